#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import pytest

from modal_security_frames import named_programs as named
from modal_security_frames import oracle
from modal_security_frames.frame import make_context
from modal_security_frames.lang import parse_program
from modal_security_frames.secprops import SATISFIED, UNSUPPORTED, VIOLATED


def test_trace_confidentiality ( ) :

    program , ctx = named.load ( named.case ( 'leak' ) )

    verdict = oracle.trace_check ( program , ctx , 'TRACE_CONF' )

    assert verdict.status == VIOLATED

    assert verdict.witnesses [ 0 ].stores == ( ( 0 , 0 ) , ( 0 , 1 ) )

    assert oracle.trace_check ( program , ctx , 'TI_TRACE_CONF' ).status == VIOLATED


def test_termination_insensitive_trace_confidentiality_ignores_hanging_runs ( ) :

    program , ctx = named.load ( named.case ( 'leak-and-hang' ) )

    assert oracle.trace_check ( program , ctx , 'TRACE_CONF' ).status == VIOLATED

    assert oracle.trace_check ( program , ctx , 'TI_TRACE_CONF' ).status == SATISFIED


def test_trace_integrity ( ) :

    program , ctx = named.load ( named.case ( 'trusted-copy' ) )

    assert oracle.trace_check ( program , ctx , 'TI_TRACE_INTEG' ).status == VIOLATED

    program , ctx = named.load ( named.case ( 'reset-then-copy' ) )

    assert oracle.trace_check ( program , ctx , 'TI_TRACE_INTEG' ).status == SATISFIED


def test_trace_robust_declassification_on_the_benchmark ( ) :

    statuses = { }

    for c in named.benchmark_cases ( ) :

        program , ctx = named.load ( c )

        statuses [ c.name ] = oracle.trace_check ( program , ctx , 'TRACE_RD' ).status

    assert statuses [ 'benchmark-i' ] == SATISFIED

    assert statuses [ 'benchmark-ii' ] == VIOLATED

    assert statuses [ 'benchmark-vi' ] == VIOLATED


def test_unsupported_runs ( ) :

    program = parse_program ( 'while true do p := 1 - p' , { 'p' : ( 0 , 1 ) } )

    verdict = oracle.trace_check ( program , make_context ( read = { 'p' } ) , 'TRACE_CONF' )

    assert verdict.status == UNSUPPORTED


def test_differential_on_named_cases ( ) :

    for name in ( 'copy' , 'leak' , 'leak-then-hang' , 'leak-and-hang' , 'endorse-copy' , 'endorse-guarded' ) :

        report = oracle.differential ( * named.load ( named.case ( name ) ) )

        assert list ( report.columns ) == [ 'trace' , 'modal' , 'trace_status' , 'modal_status' , 'agreement' , 'note' ]

        assert len ( report ) == len ( oracle.PAIRINGS )

        assert not ( report [ 'agreement' ] == oracle.DISAGREE ).any ( ) , name


def test_differential_skips_policies_without_trace_counterpart ( ) :

    report = oracle.differential ( * named.load ( named.case ( 'parity' ) ) )

    assert set ( report [ 'agreement' ] ) == { oracle.SKIPPED }


def test_differential_skips_rd_when_writes_are_unreadable ( ) :

    program = parse_program ( 'p := s' , named.SECRET )

    ctx = make_context ( read = { 'p' } , write = { 's' } , signals_termination = True )

    report = oracle.differential ( program , ctx ).set_index ( 'trace' )

    assert report.loc [ 'TRACE_RD' , 'agreement' ] == oracle.SKIPPED

    assert 'W(A)' in report.loc [ 'TRACE_RD' , 'note' ]


def test_generator_is_deterministic ( ) :

    first , ctx = oracle.gen_program ( 7 )

    again , ctx_again = oracle.gen_program ( 7 )

    assert first.text == again.text

    assert ctx == ctx_again

    assert ctx.write [ 'A' ] <= ctx.read [ 'A' ]

    assert ctx.signals_termination


def test_generated_programs_agree ( ) :

    for seed in range ( 12 ) :

        program , ctx = oracle.gen_program ( seed , n_vars = 2 , n_stmts = 3 )

        report = oracle.differential ( program , ctx , mode = 'exhaustive' )

        assert not ( report [ 'agreement' ] == oracle.DISAGREE ).any ( ) , program.text


def test_implication_audit_on_named_cases ( ) :

    corpus = [ ( c.name , ) + named.load ( c ) for c in named.corpus ( ) ]

    report = oracle.implication_audit ( corpus , named.SEPARATIONS )

    assert report [ 'holds' ].all ( ) , report [ ~ report [ 'holds' ] ]

    assert ( report [ 'kind' ] == 'separation' ).sum ( ) == len ( named.SEPARATIONS )


def test_stuttering_assignments_keep_the_endorsement_pairing_in_step ( ) :

    program , ctx = oracle.gen_program ( 7 )

    report = oracle.differential ( program , ctx , mode = 'exhaustive' )

    assert not ( report [ 'agreement' ] == oracle.DISAGREE ).any ( ) , program.text

    report = oracle.differential ( * named.load ( named.case ( 'endorse-split' ) ) ).set_index ( 'trace' )

    assert report.loc [ 'TRACE_TE' , 'agreement' ] == oracle.AGREE

    assert report.loc [ 'TRACE_TE' , 'modal_status' ] == SATISFIED


def test_differential_skips_when_termination_is_not_signalled ( ) :

    for name in ( 'reset-then-copy' , 'trusted-copy' ) :

        report = oracle.differential ( * named.load ( named.case ( name ) ) ).set_index ( 'trace' )

        for trace_id in ( 'TRACE_RD' , 'TRACE_TE' ) :

            assert report.loc [ trace_id , 'agreement' ] == oracle.SKIPPED , ( name , trace_id )

            assert 'termination not signalled' in report.loc [ trace_id , 'note' ]


@pytest.mark.slow
def test_generated_programs_agree_at_full_size ( ) :

    for seed in range ( 200 ) :

        program , ctx = oracle.gen_program ( seed , n_vars = 3 , n_stmts = 6 )

        report = oracle.differential ( program , ctx , mode = 'exhaustive' )

        assert not ( report [ 'agreement' ] == oracle.DISAGREE ).any ( ) , ( seed , program.text )
