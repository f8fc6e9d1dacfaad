#!/usr/bin/env python3
# -*- coding: utf-8 -*-

from pytest import raises

from modal_security_frames.errors import StoreBoundError
from modal_security_frames.frame import make_context
from modal_security_frames.lang import parse_program
from modal_security_frames.tracegen import (BUDGET_EXCEEDED, HALTED, LIMIT,
                                            SILENT_DIVERGE,
                                            UNSUPPORTED_DIVERGE,
                                            enumerate_initial_stores, fix,
                                            maximal_view, unfold_all,
                                            unfold_run, view)

BINARY = ( 0 , 1 )


def test_initial_stores_are_lexicographic ( ) :

    program = parse_program ( 'b := a' , { 'a' : BINARY , 'b' : ( 0 , 1 , 2 ) } )

    stores = enumerate_initial_stores ( program )

    assert stores [ : 4 ] == [ ( 0 , 0 ) , ( 0 , 1 ) , ( 0 , 2 ) , ( 1 , 0 ) ]

    assert len ( stores ) == 6

    with raises ( StoreBoundError ) :

        enumerate_initial_stores ( program , bound = 5 )


def test_halting_run ( ) :

    program = parse_program ( 'b := a; b := 0' , { 'a' : BINARY , 'b' : ( 0 , ) } )

    run = unfold_run ( program , ( 1 , 0 ) )

    assert run.status == HALTED

    assert [ c.store for c in run.configs ] == [ ( 1 , 0 ) , ( 1 , 1 ) , ( 1 , 0 ) ]

    assert run.stabilization == 3

    assert run.config_at ( 10 ) == run.configs [ -1 ]


def test_loop_diverges_silently_from_the_start ( ) :

    program = parse_program ( 'loop' , { 'p' : ( 0 , ) } )

    run = unfold_run ( program , ( 0 , ) )

    assert run.status == SILENT_DIVERGE

    assert run.stabilization == 1

    assert run.cycle_start == 0

    assert run.config_at ( 5 ).store == ( 0 , )


def test_flipping_loop_is_unsupported ( ) :

    program = parse_program ( 'while true do p := 1 - p' , { 'p' : BINARY } )

    assert all ( r.status == UNSUPPORTED_DIVERGE for r in unfold_all ( program ) )


def test_budget ( ) :

    program = parse_program ( 'p := 1; p := 0; p := 1' , { 'p' : BINARY } )

    assert unfold_run ( program , ( 0 , ) , budget = 1 ).status == BUDGET_EXCEEDED

    assert unfold_run ( program , ( 0 , ) , budget = 3 ).status == HALTED


def test_stuck_run_halts ( ) :

    program = parse_program ( 'input(x); x := 1' , { 'x' : BINARY } )

    run = unfold_run ( program , ( 0 , ( ) ) )

    assert run.status == HALTED

    assert run.stuck

    assert run.configs [ -1 ].store == ( 0 , ( ) )


def test_view_is_destuttered_and_flags_termination ( ) :

    program = parse_program ( 'b := a; b := 0' , { 'a' : BINARY , 'b' : ( 0 , ) } )

    run = unfold_run ( program , ( 0 , 0 ) )

    plain = make_context ( read = { 'b' } )

    assert view ( program , plain , 'A' , run.configs ) == ( ( 0 , ) , )

    visible = make_context ( read = { 'b' } , signals_termination = True )

    assert view ( program , visible , 'A' , run.configs ) == ( ( ( 0 , ) , False ) , ( ( 0 , ) , True ) )

    stepped = make_context ( read = { 'b' } , synchronous = True )

    assert len ( view ( program , stepped , 'A' , run.configs ) ) == 3


def test_fix_hides_writable_variables ( ) :

    program = parse_program ( 'b := a' , { 'a' : BINARY , 'b' : ( 0 , ) } )

    run = unfold_run ( program , ( 1 , 0 ) )

    ctx = make_context ( read = { 'a' , 'b' } , write = { 'a' } )

    assert fix ( program , ctx , 'A' , run.configs ) == ( ( 0 , ) , ( 1 , ) )

    assert fix ( program , ctx , 'A' , run.configs , exclude = { 'b' } ) == ( ( ) , )


def test_synchronous_maximal_view_of_a_diverging_run_ends_at_the_limit ( ) :

    program = parse_program ( 'p := s; loop' , { 'p' : ( 0 , ) , 's' : BINARY } )

    run = unfold_run ( program , ( 0 , 1 ) )

    ctx = make_context ( read = { 'p' } , synchronous = True )

    observed = maximal_view ( program , ctx , 'A' , run , horizon = 4 )

    assert observed [ -1 ] == ( LIMIT , ( 1 , ) )

    assert len ( observed ) == 5


def test_signalled_divergence_closes_the_view_with_a_limit_marker ( ) :

    program = parse_program ( 'p := s; loop' , { 'p' : ( 0 , ) , 's' : BINARY } )

    run = unfold_run ( program , ( 0 , 0 ) )

    silent = make_context ( read = { 'p' } )

    signalled = make_context ( read = { 'p' } , signals_termination = True )

    assert maximal_view ( program , silent , 'A' , run ) == ( ( 0 , ) , )

    assert maximal_view ( program , signalled , 'A' , run ) == ( ( ( 0 , ) , False ) , ( LIMIT , ( ( 0 , ) , False ) ) )


def test_signalled_fix_keeps_a_final_write_that_changes_nothing ( ) :

    program = parse_program ( 'b := a' , { 'a' : BINARY , 'b' : BINARY } )

    run = unfold_run ( program , ( 0 , 0 ) )

    silent = make_context ( read = { 'a' , 'b' } , write = { 'b' } )

    assert fix ( program , silent , 'A' , run.configs ) == ( ( 0 , ) , )

    signalled = make_context ( read = { 'a' , 'b' } , write = { 'b' } , signals_termination = True )

    assert fix ( program , signalled , 'A' , run.configs ) == ( ( ( 0 , ) , False ) , ( ( 0 , ) , True ) )
