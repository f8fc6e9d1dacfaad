#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Trace-based security definitions checked by brute force over initial
stores, differential comparison with the modal properties, a seeded random
program generator and an audit of the implications between properties.

The trace definitions compare maximal observations of whole runs: the
destuttered view for confidentiality and declassification, the destuttered
fix for integrity and endorsement.
"""

import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import List, Tuple

import pandas as pd

from . import secprops
from .errors import BudgetExceededError, UnsupportedDivergenceError
from .frame import build_frame, make_context
from .lang import parse_program
from .secprops import SATISFIED, UNSUPPORTED, VIOLATED
from .tracegen import (BUDGET_EXCEEDED, UNSUPPORTED_DIVERGE, maximal_fix,
                       maximal_view, unfold_all)

logger = logging.getLogger ( __name__ )

TRACE_IDS = ( 'TRACE_CONF' , 'TI_TRACE_CONF' , 'TI_TRACE_INTEG' , 'TRACE_RD' , 'TRACE_TE' )

PAIRINGS = ( ( 'TRACE_CONF' , 'CONF' ) ,
             ( 'TI_TRACE_CONF' , 'TI_CONF' ) ,
             ( 'TI_TRACE_INTEG' , 'TI_INTEG' ) ,
             ( 'TI_TRACE_INTEG' , 'TI_CAUSE_INTEG' ) ,
             ( 'TRACE_RD' , 'TI_RD' ) ,
             ( 'TRACE_TE' , 'TI_TE' ) )

AGREE , DISAGREE , SKIPPED = 'AGREE' , 'DISAGREE' , 'SKIPPED'

CONF_ARROWS = ( ( 'CONF' , 'TI_CONF_INTERMEDIATE' ) , ( 'TI_CONF_INTERMEDIATE' , 'TI_CONF' ) ,
                ( 'CONF' , 'PI_CONF' ) , ( 'CONF' , 'RD' ) , ( 'RD' , 'RD_VAR_A' ) , ( 'TI_CONF' , 'RD_ALT' ) ,
                ( 'RD_ALT' , 'RD_VAR_A' ) , ( 'RD_VAR_A' , 'RD_VAR_B' ) , ( 'RD_VAR_B' , 'TI_RD' ) )

INTEG_ARROWS = ( ( 'INTEG' , 'TI_INTEG' ) , ( 'INTEG' , 'TE_ALT' ) , ( 'INTEG' , 'TE' ) ,
                 ( 'TE' , 'TI_TE' ) , ( 'TI_INTEG' , 'TI_TE' ) )


@dataclass ( frozen = True )
class TraceWitness :
    agent : str
    stores : Tuple [ Tuple , ... ]
    observations : Tuple
    failed : str


@dataclass
class TraceVerdict :
    property : str
    status : str
    witnesses : List [ TraceWitness ] = field ( default_factory = list )
    reason : str = ''

    def to_dict ( self ) :

        return {
            'property' : self.property ,
            'status' : self.status ,
            'witnesses' : [ { 'agent' : w.agent , 'stores' : [ list ( s ) for s in w.stores ] , 'failed' : w.failed }
                            for w in self.witnesses ] ,
            'reason' : self.reason ,
        }


# ------------------------------------------------------------------ oracles

class _Runs ( object ) :

    """Runs of a program indexed by initial store, with memoised maximal
    observations."""

    def __init__ ( self , program , ctx , runs ) :

        self.program = program

        self.ctx = ctx

        self.by_store = { r.initial : r for r in runs }

        self.horizon = max ( [ len ( r.configs ) for r in runs ] + [ r.stabilization or 0 for r in runs ] )

        self._views = { }

        self._fixes = { }

    def run ( self , store ) :

        return self.by_store [ store ]

    def view ( self , agent , store ) :

        key = ( agent , store )

        if key not in self._views :

            self._views [ key ] = maximal_view ( self.program , self.ctx , agent , self.run ( store ) , self.horizon )

        return self._views [ key ]

    def fix ( self , agent , store ) :

        key = ( agent , store )

        if key not in self._fixes :

            self._fixes [ key ] = maximal_fix ( self.program , self.ctx , agent , self.run ( store ) )

        return self._fixes [ key ]

    def diverges ( self , * stores ) :

        return any ( self.run ( s ).diverges for s in stores )


def _assignments ( program , names ) :

    names = [ v for v in program.vars if v in names ]

    return names , list ( itertools.product ( * [ program.domains [ v ] for v in names ] ) )


def _store ( program , * parts ) :

    values = { }

    for names , assignment in parts :

        values.update ( zip ( names , assignment ) )

    return tuple ( values [ v ] for v in program.vars )


def _pairs ( program , ctx , agent , names ) :

    """Pairs of stores differing at most on ``names``."""

    xs , x_values = _assignments ( program , names )

    zs , z_values = _assignments ( program , set ( program.vars ) - set ( xs ) )

    for z in z_values :

        for v1 , v2 in itertools.combinations ( x_values , 2 ) :

            yield _store ( program , ( zs , z ) , ( xs , v1 ) ) , _store ( program , ( zs , z ) , ( xs , v2 ) )


def _quadruples ( program , outer , inner ) :

    """Stores t[i][j] = base[outer -> v_i][inner -> w_j], inner overriding."""

    ys , y_values = _assignments ( program , inner )

    xs , x_values = _assignments ( program , set ( outer ) - set ( ys ) )

    zs , z_values = _assignments ( program , set ( program.vars ) - set ( xs ) - set ( ys ) )

    for z in z_values :

        for v1 , v2 in itertools.combinations ( x_values , 2 ) :

            for w1 , w2 in itertools.combinations ( y_values , 2 ) :

                yield tuple ( tuple ( _store ( program , ( zs , z ) , ( xs , v ) , ( ys , w ) ) for w in ( w1 , w2 ) )
                              for v in ( v1 , v2 ) )


def _secret ( program , ctx , agent ) :

    return set ( program.vars ) - set ( ctx.read [ agent ] )


def _check_agent ( runs , tid , agent ) :

    program , ctx = runs.program , runs.ctx

    if tid in ( 'TRACE_CONF' , 'TI_TRACE_CONF' ) :

        for s1 , s2 in _pairs ( program , ctx , agent , _secret ( program , ctx , agent ) ) :

            if tid == 'TI_TRACE_CONF' and runs.diverges ( s1 , s2 ) :

                continue

            v1 , v2 = runs.view ( agent , s1 ) , runs.view ( agent , s2 )

            if v1 != v2 :

                yield TraceWitness ( agent , ( s1 , s2 ) , ( v1 , v2 ) , 'views differ' )

    elif tid == 'TI_TRACE_INTEG' :

        for s1 , s2 in _pairs ( program , ctx , agent , ctx.write [ agent ] ) :

            if runs.diverges ( s1 , s2 ) :

                continue

            f1 , f2 = runs.fix ( agent , s1 ) , runs.fix ( agent , s2 )

            if f1 != f2 :

                yield TraceWitness ( agent , ( s1 , s2 ) , ( f1 , f2 ) , 'fixes differ' )

    elif tid in ( 'TRACE_RD' , 'TRACE_TE' ) :

        if tid == 'TRACE_RD' :

            outer , inner , observe = _secret ( program , ctx , agent ) , ctx.write [ agent ] , runs.view

        else :

            outer , inner , observe = ctx.write [ agent ] , _secret ( program , ctx , agent ) , runs.fix

        for ( t11 , t12 ) , ( t21 , t22 ) in _quadruples ( program , outer , inner ) :

            if runs.diverges ( t11 , t12 , t21 , t22 ) :

                continue

            o11 , o12 , o21 , o22 = ( observe ( agent , s ) for s in ( t11 , t12 , t21 , t22 ) )

            if ( o11 == o21 ) != ( o12 == o22 ) :

                which = 'first' if o11 == o21 else 'second'

                yield TraceWitness ( agent , ( t11 , t12 , t21 , t22 ) , ( o11 , o12 , o21 , o22 ) ,
                                     'only the %s pair of runs is indistinguishable' % which )

    else :

        raise KeyError ( 'unknown trace property %s' % tid )


def trace_check ( program , ctx , tid , budget = 10000 , bound = 4096 , runs = None , max_witnesses = 32 ) :

    """Checks a trace-based definition by enumerating the stores it
    quantifies over.

    Parameters
    ----------
    program : Program
    ctx : SecurityContext
    tid : str
        one of ``TRACE_IDS``
    runs : list of Run or None
        already unfolded runs of the program

    Returns
    -------
    verdict : TraceVerdict
    """

    runs = unfold_all ( program , budget , bound ) if runs is None else runs

    for r in runs :

        if r.status in ( UNSUPPORTED_DIVERGE , BUDGET_EXCEEDED ) :

            return TraceVerdict ( tid , UNSUPPORTED , reason = 'run from %s: %s' % ( r.initial , r.status ) )

    indexed = _Runs ( program , ctx , runs )

    verdict = TraceVerdict ( tid , SATISFIED )

    for agent in sorted ( ctx.agents ) :

        for w in _check_agent ( indexed , tid , agent ) :

            verdict.status = VIOLATED

            if len ( verdict.witnesses ) >= max_witnesses :

                break

            verdict.witnesses.append ( w )

    return verdict


# ------------------------------------------------------------- differential

def _skip_reason ( frame , ctx , trace_id , modal_id ) :

    if ctx.declass or ctx.endorse_mode :

        return 'declassification or endorsement has no trace counterpart'

    warnings = secprops.audit_theorem_assumptions ( frame , ctx , trace_id )

    return '; '.join ( warnings ) or None


def differential ( program , ctx , pairings = PAIRINGS , mode = None , budget = 10000 , bound = 4096 ,
                   exhaustive_bound = 10 ** 7 ) :

    """Compares trace-based and modal verdicts pairing by pairing.

    Returns
    -------
    report : pandas.DataFrame
        columns ``trace``, ``modal``, ``trace_status``, ``modal_status``,
        ``agreement`` and ``note``
    """

    runs = unfold_all ( program , budget , bound )

    rows = [ ]

    traces = { }

    try :

        frame = build_frame ( program , ctx , budget , bound )

    except ( UnsupportedDivergenceError , BudgetExceededError ) as err :

        frame = None

        note = str ( err )

    for trace_id , modal_id in pairings :

        if frame is None :

            rows.append ( ( trace_id , modal_id , UNSUPPORTED , UNSUPPORTED , UNSUPPORTED , note ) )

            continue

        reason = _skip_reason ( frame , ctx , trace_id , modal_id )

        if reason :

            rows.append ( ( trace_id , modal_id , None , None , SKIPPED , reason ) )

            continue

        if trace_id not in traces :

            traces [ trace_id ] = trace_check ( program , ctx , trace_id , runs = runs )

        t = traces [ trace_id ]

        m = secprops.check ( frame , modal_id , mode = mode , bound = exhaustive_bound , first = True )

        if UNSUPPORTED in ( t.status , m.status ) :

            agreement = UNSUPPORTED

        else :

            agreement = AGREE if t.status == m.status else DISAGREE

        if agreement == DISAGREE :

            logger.warning ( '%s and %s disagree on %r' , trace_id , modal_id , program.text )

        rows.append ( ( trace_id , modal_id , t.status , m.status , agreement , '' ) )

    return pd.DataFrame ( rows , columns = [ 'trace' , 'modal' , 'trace_status' , 'modal_status' , 'agreement' , 'note' ] )


# ---------------------------------------------------------------- generator

_NAMES = 'abcdefgh'

_OPS = ( '+' , '-' , 'xor' , 'and' , 'or' , '=' , '!=' )


class ProgramGenerator ( object ) :

    """Random loop-bounded programs over binary variables. The only
    non-terminating construct is ``loop``, whose body never changes the
    store."""

    def __init__ ( self , seed , n_vars = 3 , n_stmts = 6 , max_depth = 2 ) :

        self.rng = random.Random ( seed )

        self.names = list ( _NAMES [ : n_vars ] )

        self.n_stmts = n_stmts

        self.max_depth = max_depth

    def expr ( self ) :

        roll = self.rng.random ( )

        if roll < 0.2 :

            return str ( self.rng.randint ( 0 , 1 ) )

        if roll < 0.55 :

            return self.rng.choice ( self.names )

        return '(%s %s %s)' % ( self.rng.choice ( self.names ) , self.rng.choice ( _OPS ) , self.rng.choice ( self.names ) )

    def stmt ( self , depth = 0 ) :

        roll = self.rng.random ( )

        if roll < 0.55 or depth >= self.max_depth :

            if roll < 0.1 :

                return 'loop'

            if roll < 0.15 :

                return 'skip'

            return '%s := %s' % ( self.rng.choice ( self.names ) , self.expr ( ) )

        if roll < 0.75 :

            return 'if %s then (%s) else (%s)' % ( self.expr ( ) , self.stmt ( depth + 1 ) , self.stmt ( depth + 1 ) )

        if roll < 0.9 :

            return 'if %s then (%s)' % ( self.expr ( ) , self.stmt ( depth + 1 ) )

        return '%s; %s' % ( self.stmt ( depth + 1 ) , self.stmt ( depth + 1 ) )

    def program ( self ) :

        count = self.rng.randint ( 1 , self.n_stmts )

        return '; '.join ( self.stmt ( ) for _ in range ( count ) )

    def context ( self , target_rd = True ) :

        read = { v for v in self.names if self.rng.random ( ) < 0.5 }

        write = { v for v in self.names if self.rng.random ( ) < 0.3 }

        if target_rd :

            read |= write

        return make_context ( read = read , write = write , signals_termination = target_rd )


def gen_program ( seed , n_vars = 3 , n_stmts = 6 , target_rd = True ) :

    """Deterministic random program and context for a seed.

    Returns
    -------
    program : Program
    ctx : SecurityContext
    """

    gen = ProgramGenerator ( seed , n_vars , n_stmts )

    text = gen.program ( )

    ctx = gen.context ( target_rd )

    return parse_program ( text , { v : ( 0 , 1 ) for v in gen.names } ) , ctx


# -------------------------------------------------------------------- audit

def implication_audit ( corpus , separations = ( ) , arrows = CONF_ARROWS + INTEG_ARROWS , mode = None ,
                        budget = 10000 , bound = 4096 ) :

    """Checks that no corpus member satisfies the stronger end of an arrow
    while violating the weaker end, and that each separating program splits
    its pair of properties.

    Parameters
    ----------
    corpus : iterable of (name, program, ctx)
    separations : iterable of (name, stronger, weaker)

    Returns
    -------
    report : pandas.DataFrame
        columns ``kind``, ``stronger``, ``weaker``, ``holds`` and
        ``counterexamples``
    """

    pids = sorted ( { p for arrow in arrows for p in arrow } | { p for s in separations for p in s [ 1 : ] } )

    verdicts = { }

    for name , program , ctx in corpus :

        for v in secprops.check_program ( program , ctx , pids , mode = mode , budget = budget , bound = bound ,
                                              first = True ) :

            verdicts [ ( name , v.property ) ] = v.status

    names = [ name for name , _ , _ in corpus ]

    rows = [ ]

    for stronger , weaker in arrows :

        bad = [ n for n in names if verdicts.get ( ( n , stronger ) ) == SATISFIED
                and verdicts.get ( ( n , weaker ) ) == VIOLATED ]

        rows.append ( ( 'arrow' , stronger , weaker , not bad , bad ) )

    for name , stronger , weaker in separations :

        split = verdicts.get ( ( name , stronger ) ) == SATISFIED and verdicts.get ( ( name , weaker ) ) == VIOLATED

        rows.append ( ( 'separation' , stronger , weaker , split , [ ] if split else [ name ] ) )

    return pd.DataFrame ( rows , columns = [ 'kind' , 'stronger' , 'weaker' , 'holds' , 'counterexamples' ] )
