#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import numpy as np
from pytest import raises

from modal_security_frames import mlogic as ml
from modal_security_frames import named_programs as named
from modal_security_frames.errors import (ExhaustiveBoundError,
                                          NotTemporallySoundError,
                                          UnsupportedAtomError)
from modal_security_frames.frame import build_frame, make_context
from modal_security_frames.lang import parse_program


def reset_frame ( ) :

    program = parse_program ( 'b := a; b := 0' , { 'a' : ( 0 , 1 ) , 'b' : ( 0 , ) } )

    return build_frame ( program , make_context ( read = { 'b' } , write = { 'a' } ) )


def test_cuts_select_run_suffixes ( ) :

    frame = reset_frame ( )

    mask = ml.TSProperty ( ( 1 , 3 ) ).mask ( frame )

    assert list ( mask ) == [ False , True , True , False , False , False ]


def test_exhaustive_enumeration_counts_every_cut_vector ( ) :

    frame = reset_frame ( )

    assert ml.exhaustive_count ( frame ) == 16

    cuts = list ( ml.enumerate_ts ( frame , ml.EXHAUSTIVE ) )

    assert len ( cuts ) == 16 == len ( set ( cuts ) )

    assert cuts [ 0 ] == ( 0 , 0 ) and cuts [ -1 ] == ( 3 , 3 )

    with raises ( ExhaustiveBoundError ) :

        list ( ml.enumerate_ts ( frame , ml.EXHAUSTIVE , bound = 15 ) )


def test_runset_enumeration ( ) :

    frame = reset_frame ( )

    whole = list ( ml.enumerate_ts ( frame , 'runset:0' ) )

    assert sorted ( whole ) == [ ( 0 , 0 ) , ( 0 , 3 ) , ( 3 , 0 ) , ( 3 , 3 ) ]

    assert len ( list ( ml.enumerate_ts ( frame , 'runset:1' ) ) ) == 12

    assert set ( ml.enumerate_ts ( frame , 'runset:2' ) ) == set ( ml.enumerate_ts ( frame , ml.EXHAUSTIVE ) )


def test_batches_cover_the_stream ( ) :

    frame = reset_frame ( )

    batches = list ( ml.iter_batches ( frame , ml.EXHAUSTIVE , size = 5 ) )

    assert [ c.shape [ 0 ] for c , _ in batches ] == [ 5 , 5 , 5 , 1 ]

    assert all ( m.shape == ( frame.n_worlds , c.shape [ 0 ] ) for c , m in batches )


def test_parse_mode ( ) :

    assert ml.parse_mode ( None ) == ( ml.RUNSET , 2 )

    assert ml.parse_mode ( 'runset:3' ) == ( ml.RUNSET , 3 )

    assert ml.parse_mode ( 'exhaustive' ) == ( ml.EXHAUSTIVE , None )

    with raises ( ValueError ) :

        ml.parse_mode ( 'random' )


def test_temporal_operators ( ) :

    frame = reset_frame ( )

    halted = ml.evaluate ( frame , ml.Halted ( ) )

    assert list ( ml.evaluate ( frame , ml.eventually ( ml.Halted ( ) ) ) ) == [ True ] * 6

    assert list ( ml.evaluate ( frame , ml.always ( ml.Halted ( ) ) ) ) == list ( halted )

    assert not ml.evaluate ( frame , ml.bottom ( ) ).any ( )


def test_value_atoms_hold_from_their_depth_on ( ) :

    frame = reset_frame ( )

    truth = ml.evaluate ( frame , ml.ValueAtom ( 'b' , 1 , 1 ) )

    assert list ( truth ) == [ False , False , False , False , True , True ]

    assert ml.atom_extension ( frame , ml.ValueAtom ( 'a' , 0 , 1 ) ) == ml.TSProperty ( ( 3 , 0 ) )


def test_value_atom_past_stabilization ( ) :

    program = parse_program ( 'loop' , { 'p' : ( 0 , ) } )

    frame = build_frame ( program , make_context ( read = { 'p' } ) )

    assert ml.evaluate ( frame , ml.ValueAtom ( 'p' , 0 , 0 ) ).all ( )

    with raises ( UnsupportedAtomError ) :

        ml.evaluate ( frame , ml.ValueAtom ( 'p' , 1 , 0 ) )


def test_extension_requires_closure_under_time ( ) :

    frame = reset_frame ( )

    with raises ( NotTemporallySoundError ) :

        ml.atom_extension ( frame , ml.Not ( ml.Halted ( ) ) )


def test_knowledge_box ( ) :

    frame = reset_frame ( )

    # b reveals a once it has been copied
    knows = ml.evaluate ( frame , ml.Box ( 'KC' , 'A' , ml.ValueAtom ( 'a' , 0 , 1 ) ) )

    assert list ( knows ) == [ False , False , False , False , True , True ]


def test_candidates_are_evaluated_column_by_column ( ) :

    frame = reset_frame ( )

    cuts , mask = next ( ml.iter_batches ( frame , ml.EXHAUSTIVE , size = 16 ) )

    together = ml.evaluate ( frame , ml.eventually ( ml.Phi ( ) ) , mask )

    for c in range ( cuts.shape [ 0 ] ) :

        alone = ml.evaluate ( frame , ml.eventually ( ml.Phi ( ) ) , mask [ : , c ] )

        assert np.array_equal ( together [ : , c ] , alone )


def test_stability ( ) :

    frame = reset_frame ( )

    # a is writable, so a property fixing a is not write-stable
    assert not ml.is_write_stable ( frame , 'A' , ml.TSProperty ( ( 3 , 0 ) ) )

    assert ml.is_write_stable ( frame , 'A' , ml.TSProperty ( ( 0 , 0 ) ) )

    assert ml.is_write_stable ( frame , 'A' , ml.TSProperty ( ( 3 , 3 ) ) )

    assert ml.is_read_stable ( frame , 'A' , ml.TSProperty ( ( 0 , 0 ) ) )

    # b shows nothing of a before the copy
    assert not ml.is_read_stable ( frame , 'A' , ml.TSProperty ( ( 3 , 0 ) ) )


def test_rendering ( ) :

    frame = reset_frame ( )

    assert ml.render ( frame , ( 3 , 0 ) ) == 'a@0=1'

    assert ml.render ( frame , ( 3 , 3 ) ) == '⊥'

    assert ml.render ( frame , ( 3 , 1 ) ) == 'run1@>=1'


def test_query_syntax ( ) :

    f = ml.parse_formula ( 'dia(WC:A) eventually box(KC:A) s@0=0' )

    assert f == ml.Dia ( 'WC' , 'A' , ml.Dia ( 'T' , None , ml.Box ( 'KC' , 'A' , ml.ValueAtom ( 's' , 0 , 0 ) ) ) )

    assert ml.parse_formula ( 'phi => not halted or true' ) == ml.Implies ( ml.Phi ( ) , ml.Or ( ml.Not ( ml.Halted ( ) ) , ml.Top ( ) ) )

    frame = reset_frame ( )

    g = ml.parse_formula ( 'set(1, none)' , frame )

    assert g == ml.SetAtom ( ml.TSProperty ( ( 1 , 3 ) ) )

    with raises ( ValueError ) :

        ml.parse_formula ( 'box(KC:A' )


def test_query_on_the_benchmark_frame ( ) :

    program = parse_program ( 'if u = 1 then p := s' , named.FRAME_DOMAINS )

    frame = build_frame ( program , named.BENCHMARK_CONTEXT )

    truth = ml.evaluate ( frame , ml.parse_formula ( 'eventually box(KC:A) s@0=0' , frame ) )

    # only runs with u=1 and s=0 come to know s
    assert [ frame.runs [ r ].initial for r in np.unique ( frame.run_of [ truth ] ) ] == [ ( 1 , 0 , 0 ) ]


def test_declassified_parity_is_permitted_knowledge ( ) :

    program , ctx = named.load ( named.case ( 'parity' ) )

    frame = build_frame ( program , ctx )

    # initial store p=0, s1=1, s2=1
    world = frame.world_index ( 3 , 0 )

    assert frame.runs [ 3 ].initial == ( 0 , 1 , 1 )

    assert ml.eval_at ( frame , world , ml.parse_formula ( 'box(KP:A) eventually p@1=0' , frame ) )

    assert not ml.eval_at ( frame , world , ml.parse_formula ( 'box(KC:A) eventually p@1=0' , frame ) )
