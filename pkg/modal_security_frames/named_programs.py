#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Named example programs with their security contexts, and the robust
declassification benchmark table.

The benchmark runs six small programs in which agent A reads ``p`` and
writes ``u`` against four robust declassification variants. A also reads
``u`` and sees termination.
"""

from collections import namedtuple

import pandas as pd

from . import secprops
from .frame import build_frame, make_context
from .lang import parse_program

Case = namedtuple ( 'Case' , [ 'name' , 'text' , 'domains' , 'ctx' ] )

BINARY = ( 0 , 1 )

BENCHMARK_DOMAINS = { 'u' : BINARY , 's' : BINARY , 'h' : BINARY , 'p' : ( 0 , ) }

BENCHMARK_CONTEXT = make_context ( read = { 'p' , 'u' } , write = { 'u' } , signals_termination = True )

BENCHMARK_HEADER = 'agent A reads p and writes u; A is also given read access to u and termination signalling'

BENCHMARK_COLUMNS = ( 'RD' , 'RD_VAR_A' , 'RD_VAR_B' , 'TI_RD' )

BENCHMARK_ROWS = (
    ( 'i' , 'p := s' ) ,
    ( 'ii' , 'if u = 1 then p := s' ) ,
    ( 'iii' , '(if u = 1 then p := s); loop' ) ,
    ( 'iv' , 'if u = 1 then (p := s; if s = 1 then loop)' ) ,
    ( 'v' , '(if u = 1 then p := s); if (s and (u xor h)) = 1 then loop' ) ,
    ( 'vi' , '(if u = 1 then p := s); if (s and h) = 1 then loop' ) ,
)

# expected violation witness per cell, None where the property holds
BENCHMARK_EXPECTED = {
    'i' : ( None , None , None , None ) ,
    'ii' : ( 's@0=0' , 's@0=0' , 's@0=0' , 's@0=0' ) ,
    'iii' : ( 's@0=0' , None , None , None ) ,
    'iv' : ( 's@0=0' , 's@0=0' , None , None ) ,
    'v' : ( 's@0=0' , 's@0=0' , 's@0=0' , None ) ,
    'vi' : ( 's@0=0' , 's@0=0' , 's@0=0' , 'h@0=1 ∨ s@0=0' ) ,
}


def benchmark_cases ( ) :

    return [ Case ( 'benchmark-%s' % row , text , BENCHMARK_DOMAINS , BENCHMARK_CONTEXT ) for row , text in BENCHMARK_ROWS ]


# frame of 'if u = 1 then p := s' drawn without the unused variable h
FRAME_DOMAINS = { 'u' : BINARY , 's' : BINARY , 'p' : ( 0 , ) }

SECRET = { 'p' : ( 0 , ) , 's' : BINARY }

TERMINATION_VISIBLE = make_context ( read = { 'p' } , signals_termination = True )

COPY_CONTEXT = make_context ( read = { 'b' } , signals_termination = True )

PROGRESS_DOMAINS = { 'p' : ( 0 , ) , 'i' : ( 0 , ) , 's' : ( 0 , 1 , 2 , 3 ) }

PROGRESS_CONTEXT = make_context ( read = { 'p' } )

DECLASS_DOMAINS = { 'p' : ( 0 , ) , 's1' : BINARY , 's2' : BINARY }

DECLASS_CONTEXT = make_context ( read = { 'p' } , declass = 's1 xor s2' )

TRUST_DOMAINS = { 't' : BINARY , 'u' : BINARY }

TRUST_CONTEXT = make_context ( read = { 't' , 'u' } , write = { 'u' } )

EVENT_CONTEXT = make_context ( read = { 't' , 'u' } , write = { 'u' } , endorse_mode = 'event' )

ENDORSE_DOMAINS = { 's' : BINARY , 't' : BINARY , 'u' : BINARY }

ENDORSE_CONTEXT = make_context ( read = { 't' , 'u' } , write = { 'u' } , signals_termination = True )

SPLIT_DOMAINS = { 's' : BINARY , 't1' : BINARY , 't2' : BINARY , 'u' : BINARY }

SPLIT_CONTEXT = make_context ( read = { 't1' , 't2' , 'u' } , write = { 'u' } , signals_termination = True )


CASES = (
    Case ( 'copy' , 'b := a' , { 'a' : BINARY , 'b' : ( 0 , ) } , COPY_CONTEXT ) ,
    Case ( 'leak' , 'p := s' , SECRET , TERMINATION_VISIBLE ) ,
    Case ( 'leak-then-hang' , 'p := s; if s = 1 then loop' , SECRET , TERMINATION_VISIBLE ) ,
    Case ( 'leak-and-hang' , 'p := s; loop' , SECRET , TERMINATION_VISIBLE ) ,
    Case ( 'count-up' , 'for i = 0 .. s do p := i' , PROGRESS_DOMAINS , PROGRESS_CONTEXT ) ,
    Case ( 'count-down' , 'for i = 0 .. s do p := s - i' , PROGRESS_DOMAINS , PROGRESS_CONTEXT ) ,
    Case ( 'parity' , 'p := s1 xor s2' , DECLASS_DOMAINS , DECLASS_CONTEXT ) ,
    Case ( 'reset-then-copy' , 'u := 0; t := u' , TRUST_DOMAINS , TRUST_CONTEXT ) ,
    Case ( 'trusted-copy' , 't := u' , TRUST_DOMAINS , TRUST_CONTEXT ) ,
    Case ( 'endorse-then-copy' , 'endorse(A, t); t := u' , TRUST_DOMAINS , EVENT_CONTEXT ) ,
    Case ( 'copy-then-endorse' , 't := u; endorse(A, t)' , TRUST_DOMAINS , EVENT_CONTEXT ) ,
    Case ( 'endorse-copy' , 't := u' , ENDORSE_DOMAINS , ENDORSE_CONTEXT ) ,
    Case ( 'endorse-guarded' , 'if s = 1 then t := u' , ENDORSE_DOMAINS , ENDORSE_CONTEXT ) ,
    Case ( 'endorse-split' , 'if s = 1 then t1 := u else t2 := u' , SPLIT_DOMAINS , SPLIT_CONTEXT ) ,
    Case ( 'declassify-or-hang' , 'if u = 1 then p := s else loop' , BENCHMARK_DOMAINS , BENCHMARK_CONTEXT ) ,
    Case ( 'declassify-then-hang' , 'p := s; if u = 0 then loop' , BENCHMARK_DOMAINS , BENCHMARK_CONTEXT ) ,
)

# (program, stronger, weaker): the program satisfies the first and violates the second
SEPARATIONS = (
    ( 'declassify-then-hang' , 'RD' , 'RD_ALT' ) ,
    ( 'declassify-or-hang' , 'TI_RD' , 'RD_ALT' ) ,
    ( 'count-up' , 'PI_CONF' , 'CONF' ) ,
)


def corpus ( ) :

    """Every named case, benchmark rows included."""

    return list ( CASES ) + benchmark_cases ( )


def case ( name ) :

    for c in corpus ( ) :

        if c.name == name :

            return c

    raise KeyError ( name )


def load ( c ) :

    """Program and context of a case."""

    return parse_program ( c.text , c.domains ) , c.ctx


def benchmark_table ( mode = None , ** kwargs ) :

    """Verdict table of the benchmark: one row per program, one column per
    robust declassification variant, holding the rendered witness at the
    all-zero initial world (or the first witness when that world is not
    violating) and '--' where the property holds.

    Returns
    -------
    table : pandas.DataFrame
    """

    rows = [ ]

    for ( row , text ) , c in zip ( BENCHMARK_ROWS , benchmark_cases ( ) ) :

        program , ctx = load ( c )

        frame = build_frame ( program , ctx )

        cells = [ ]

        for pid in BENCHMARK_COLUMNS :

            v = secprops.check ( frame , pid , mode = mode , ** kwargs )

            if v.status != secprops.VIOLATED :

                cells.append ( '--' if v.status == secprops.SATISFIED else v.status )

                continue

            at_zero = [ w for w in v.witnesses if w.world == 0 ]

            cells.append ( ( at_zero or v.witnesses ) [ 0 ].rendered )

        rows.append ( [ row , text ] + cells )

    return pd.DataFrame ( rows , columns = [ 'row' , 'program' ] + list ( BENCHMARK_COLUMNS ) )
