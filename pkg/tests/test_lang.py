#!/usr/bin/env python3
# -*- coding: utf-8 -*-

from pytest import raises

from modal_security_frames.errors import (ProgramSyntaxError,
                                          ReservedVariableError, StuckError,
                                          UndeclaredVariableError)
from modal_security_frames.lang import (HALT, Assign, BinOp, Config, Head,
                                        If, Lit, Seq, Skip, Tail, Var,
                                        While,
                                        desugar, evaluate, initial_config,
                                        parse_expr, parse_program, step)

BINARY = ( 0 , 1 )


def test_variables_follow_domain_order_with_reserved_last ( ) :

    program = parse_program ( 'output(s); p := s' , { 's' : BINARY , 'p' : ( 0 , ) } )

    assert program.vars == ( 's' , 'p' , 'O' )

    assert program.user_vars == ( 's' , 'p' )

    assert program.domains [ 'O' ] == ( ( ) , )


def test_declarations_override_domains ( ) :

    program = parse_program ( 'var s in 0..3\nvar p in {1, 0}\np := s' , { 's' : BINARY } )

    assert program.domains [ 's' ] == ( 0 , 1 , 2 , 3 )

    assert program.domains [ 'p' ] == ( 0 , 1 )

    assert program.modulus == 4


def test_loop_is_a_silent_while ( ) :

    program = parse_program ( 'loop' , { } )

    assert program.ast == While ( Lit ( 1 ) , Skip ( ) )


def test_if_without_else_gets_skip ( ) :

    program = parse_program ( 'if u = 1 then p := s' , { 'u' : BINARY , 's' : BINARY , 'p' : ( 0 , ) } )

    assert program.ast == If ( BinOp ( 'eq' , Var ( 'u' ) , Lit ( 1 ) ) , Assign ( 'p' , Var ( 's' ) ) , Skip ( ) )


def test_for_unrolls_first_iteration_before_the_guarded_loop ( ) :

    program = parse_program ( 'for i = 0 .. s do p := i' , { 's' : BINARY , 'i' : ( 0 , ) , 'p' : ( 0 , ) } )

    init , rest = program.ast.first , program.ast.second

    assert init == Assign ( 'i' , Lit ( 0 ) )

    assert rest.cond == BinOp ( 'le' , Var ( 'i' ) , Var ( 's' ) )

    assert isinstance ( rest.then.second , While )


def test_input_reads_the_head_of_the_stream ( ) :

    program = parse_program ( 'input(x)' , { 'x' : BINARY } )

    assert 'I' in program.vars

    assert program.ast == Seq ( Assign ( 'x' , Head ( Var ( 'I' ) ) ) , Assign ( 'I' , Tail ( Var ( 'I' ) ) ) )


def test_desugaring_is_idempotent ( ) :

    program = parse_program ( 'for i = 0 .. 1 do (output(i); endorse(A, i))' , { 'i' : BINARY } )

    assert desugar ( program.ast ) == program.ast


def test_undeclared_variable ( ) :

    with raises ( UndeclaredVariableError ) :

        parse_program ( 'p := s' , { 'p' : BINARY } )


def test_reserved_variables_cannot_be_assigned ( ) :

    with raises ( ReservedVariableError ) :

        parse_program ( 'O := 1' , { } )

    with raises ( ReservedVariableError ) :

        parse_program ( 'skip' , { 'E' : BINARY } )


def test_syntax_error_carries_position ( ) :

    with raises ( ProgramSyntaxError ) as err :

        parse_program ( 'p := := s' , { 'p' : BINARY , 's' : BINARY } )

    assert err.value.line == 1


def test_arithmetic_wraps_around_the_modulus ( ) :

    program = parse_program ( 'p := s' , { 'p' : BINARY , 's' : BINARY } )

    store = ( 1 , 1 )

    assert evaluate ( parse_expr ( 'p + s' ) , store , program ) == 0

    assert evaluate ( parse_expr ( 'p - s - s' ) , store , program ) == 1

    assert evaluate ( parse_expr ( 'p xor s' ) , store , program ) == 0

    assert evaluate ( parse_expr ( 'p < 2 and not (s = 0)' ) , store , program ) == 1


def test_head_of_empty_stream_is_stuck ( ) :

    program = parse_program ( 'input(x)' , { 'x' : BINARY } )

    with raises ( StuckError ) :

        step ( program , initial_config ( program , ( 0 , ( ) ) ) )


def test_conditional_assignment_takes_one_step_from_every_store ( ) :

    program = parse_program ( 'if u = 1 then p := s' , { 'u' : BINARY , 's' : BINARY , 'p' : ( 0 , ) } )

    for store in ( ( 0 , 0 , 0 ) , ( 0 , 1 , 0 ) , ( 1 , 0 , 0 ) , ( 1 , 1 , 0 ) ) :

        nxt = step ( program , initial_config ( program , store ) )

        assert nxt.halted

        assert nxt.store == ( store [ 0 ] , store [ 1 ] , store [ 1 ] if store [ 0 ] else 0 )


def test_halted_configuration_has_no_successor ( ) :

    program = parse_program ( 'skip' , { } )

    with raises ( ValueError ) :

        step ( program , Config ( HALT , ( ) ) )
