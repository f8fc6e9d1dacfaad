#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Modal security properties: confidentiality, integrity, robust
declassification and transparent endorsement with their termination and
progress insensitive variants.

Every property is a formula template over a placeholder property ``Phi``
that must hold at every world, for every agent and every admissible
temporally sound property. Robust declassification variants only range over
write-stable properties and transparent endorsement variants over read-stable
ones.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
import pandas as pd

from . import mlogic as ml
from .errors import (BudgetExceededError, ExhaustiveBoundError,
                     UnsupportedDivergenceError)
from .frame import build_frame

logger = logging.getLogger ( __name__ )

SATISFIED = 'SATISFIED'
VIOLATED = 'VIOLATED'
UNSUPPORTED = 'UNSUPPORTED'

PROPERTY_IDS = ( 'CONF' , 'TI_CONF' , 'TI_CONF_INTERMEDIATE' , 'PI_CONF' ,
                 'INTEG' , 'TI_INTEG' , 'CAUSE_INTEG' , 'TI_CAUSE_INTEG' ,
                 'RD' , 'RD_SIMPLIFIED' , 'TI_RD' , 'RD_VAR_A' , 'RD_VAR_B' , 'RD_ALT' ,
                 'TE' , 'TI_TE' , 'TE_ALT' )

WRITE_STABLE = ( 'RD' , 'RD_SIMPLIFIED' , 'TI_RD' , 'RD_VAR_A' , 'RD_VAR_B' , 'RD_ALT' )

READ_STABLE = ( 'TE' , 'TI_TE' , 'TE_ALT' )


@dataclass ( frozen = True )
class Witness :
    world : int
    run : int
    depth : object
    agent : str
    cuts : Tuple [ int , ... ]
    rendered : str


@dataclass
class Verdict :
    property : str
    status : str
    witnesses : List [ Witness ] = field ( default_factory = list )
    mode : str = ''
    warnings : List [ str ] = field ( default_factory = list )
    reason : str = ''

    @property
    def violated ( self ) :

        return self.status == VIOLATED

    def to_dict ( self ) :

        return {
            'property' : self.property ,
            'status' : self.status ,
            'mode' : self.mode ,
            'witnesses' : [ { 'world' : { 'run' : w.run , 'depth' : w.depth } , 'agent' : w.agent ,
                              'phi_rendered' : w.rendered , 'phi_cuts' : list ( w.cuts ) }
                            for w in self.witnesses ] ,
            'warnings' : list ( self.warnings ) ,
            'reason' : self.reason ,
        }


# ------------------------------------------------------------------ templates

def _templates ( rel , halts , phi ) :

    """Formula of every property id for one agent. ``rel`` holds the box and
    diamond builders over the agent's relations."""

    ev , al = ml.eventually , ml.always

    box , dia = rel

    not_h = ml.Not ( halts )

    ev_h = ev ( halts )

    runs_forever = al ( not_h )

    knows = box ( 'KC' , phi )

    leak = ml.And ( ev ( knows ) , ml.Not ( box ( 'KP' , ev ( phi ) ) ) )

    ti_leak = ml.And ( ev ( knows ) , ml.Not ( box ( 'KP' , ml.Or ( runs_forever , ev ( phi ) ) ) ) )

    caused = box ( 'WP' , phi )

    influence = ml.And ( ev ( caused ) , ml.Not ( box ( 'WC' , ev ( phi ) ) ) )

    ti_influence = ml.And ( ev ( caused ) , ml.Not ( box ( 'WC' , ml.Or ( runs_forever , ev ( phi ) ) ) ) )

    bad_flow = ml.And ( dia ( 'WC' , ev ( phi ) ) , ml.Not ( ev ( dia ( 'WP' , phi ) ) ) )

    return {
        'CONF' : ml.Implies ( ev ( knows ) , box ( 'KP' , ev ( phi ) ) ) ,
        'TI_CONF' : ml.Implies ( ml.And ( ev_h , ev ( knows ) ) ,
                                 box ( 'KP' , ml.Or ( runs_forever , ev ( phi ) ) ) ) ,
        'TI_CONF_INTERMEDIATE' : ml.Implies ( ml.And ( ev_h , ev ( knows ) ) , box ( 'KP' , ev ( phi ) ) ) ,
        'PI_CONF' : ml.Implies ( ev ( ml.And ( knows , ml.Not ( box ( 'K#' , phi ) ) ) ) ,
                                 box ( 'KP' , ev ( phi ) ) ) ,
        'INTEG' : ml.Implies ( dia ( 'WC' , ev ( phi ) ) , ev ( dia ( 'WP' , phi ) ) ) ,
        'TI_INTEG' : ml.Implies ( dia ( 'WC' , ml.And ( ev_h , ev ( phi ) ) ) ,
                                  ml.Or ( runs_forever , ev ( dia ( 'WP' , phi ) ) ) ) ,
        'CAUSE_INTEG' : ml.Implies ( ev ( caused ) , box ( 'WC' , ev ( phi ) ) ) ,
        'TI_CAUSE_INTEG' : ml.Implies ( ml.And ( ev_h , ev ( caused ) ) ,
                                        box ( 'WC' , ml.Or ( runs_forever , ev ( phi ) ) ) ) ,
        'RD' : ml.Implies ( dia ( 'WC' , leak ) , leak ) ,
        'RD_SIMPLIFIED' : ml.Implies ( dia ( 'WC' , ev ( knows ) ) , ev ( knows ) ) ,
        'RD_VAR_A' : ml.Implies ( dia ( 'WC' , ml.And ( ev_h , ev ( knows ) ) ) ,
                                  ml.Or ( runs_forever , ev ( knows ) ) ) ,
        'RD_VAR_B' : ml.Implies ( dia ( 'WC' , ml.conj ( ev_h , ev ( knows ) ,
                                                         ml.Not ( box ( 'KP' , ml.Or ( runs_forever , ev ( phi ) ) ) ) ) ) ,
                                  ml.Or ( runs_forever , ev ( knows ) ) ) ,
        'RD_ALT' : ml.Implies ( dia ( 'WC' , ml.And ( ev_h , ti_leak ) ) , ml.And ( ev_h , ti_leak ) ) ,
        'TI_RD' : ml.Implies ( dia ( 'WC' , ml.conj ( ev_h , ti_leak ,
                                                      box ( 'KC' , ml.Implies ( al ( ml.Not ( phi ) ) , ev_h ) ) ) ) ,
                               ml.Or ( runs_forever , ti_leak ) ) ,
        'TE' : ml.Implies ( dia ( 'KC' , influence ) , influence ) ,
        'TI_TE' : ml.Implies ( dia ( 'KC' , ml.conj ( ev_h , ti_influence ,
                                                      box ( 'WP' , ml.Implies ( al ( ml.Not ( phi ) ) , ev_h ) ) ) ) ,
                               ml.Or ( runs_forever , ti_influence ) ) ,
        'TE_ALT' : ml.Implies ( bad_flow , box ( 'KC' , bad_flow ) ) ,
    }


def _simplified_ti_rd ( rel , halts , phi ) :

    ev , al = ml.eventually , ml.always

    box , dia = rel

    ev_h = ev ( halts )

    knows = ev ( box ( 'KC' , phi ) )

    premise = ml.conj ( ev_h , knows , box ( 'KC' , ml.Implies ( al ( ml.Not ( phi ) ) , ev_h ) ) )

    return ml.Implies ( dia ( 'WC' , premise ) , ml.Or ( al ( ml.Not ( halts ) ) , knows ) )


def knowledge_unrefined ( frame , agent ) :

    return bool ( np.array_equal ( frame.relation ( 'KC' , agent ) , frame.relation ( 'KP' , agent ) ) )


def template ( pid , agent , frame = None ) :

    """Formula of a property for one agent over the placeholder ``Phi``.

    Without declassification the two knowledge relations coincide, and
    termination-insensitive robust declassification takes its single
    knowledge relation form.
    """

    if pid not in PROPERTY_IDS :

        raise KeyError ( 'unknown property %s' % pid )

    rel = ( lambda name , f : ml.Box ( name , agent , f ) , lambda name , f : ml.Dia ( name , agent , f ) )

    if pid == 'TI_RD' and ( frame is None or knowledge_unrefined ( frame , agent ) ) :

        return _simplified_ti_rd ( rel , ml.Halted ( ) , ml.Phi ( ) )

    return _templates ( rel , ml.Halted ( ) , ml.Phi ( ) ) [ pid ]


def admissible ( frame , pid , agent , mask ) :

    if pid in WRITE_STABLE :

        return ml.write_stable_mask ( frame , agent , mask )

    if pid in READ_STABLE :

        return ml.read_stable_mask ( frame , agent , mask )

    return np.ones ( mask.shape [ 1 ] , dtype = bool )


# --------------------------------------------------------------------- checks

def _mode_text ( mode ) :

    kind , k = ml.parse_mode ( mode )

    return kind if k is None else '%s:%d' % ( kind , k )


def check ( frame , pid , agents = None , mode = None , batch = 4096 , bound = 10 ** 7 , max_witnesses = 32 ,
            first = False ) :

    """Decides a property on a frame.

    Candidate properties are tried in two passes: first the readable
    whole-run properties of the witness dictionary, then every property of
    the search mode. Each violating world and agent gets one witness, the
    first violating candidate in that order.

    Parameters
    ----------
    frame : SecurityFrame
    pid : str
        one of ``PROPERTY_IDS``
    agents : iterable of str or None
        defaults to every agent of the frame
    mode : str or tuple
        ``exhaustive`` or ``runset:K``
    batch : int
        candidates evaluated per matrix product
    bound : int
        largest exhaustive enumeration allowed
    max_witnesses : int
        witnesses kept in the verdict
    first : bool
        stop at the first batch with a violation, for callers that only
        need the status

    Returns
    -------
    verdict : Verdict
    """

    mode = ml.parse_mode ( mode )

    agents = sorted ( frame.ctx.agents if agents is None else agents )

    verdict = Verdict ( pid , SATISFIED , mode = _mode_text ( mode ) )

    names , dict_cuts = ml.witness_dictionary ( frame )

    found = { }

    for agent in agents :

        formula = template ( pid , agent , frame )

        def scan ( cuts , mask , labels = None ) :

            ok = admissible ( frame , pid , agent , mask )

            if not ok.any ( ) :

                return

            value = ml.evaluate ( frame , formula , mask [ : , ok ] )

            bad_worlds , bad_cols = np.nonzero ( ~ value )

            kept = cuts [ ok ]

            kept_labels = None if labels is None else [ l for l , o in zip ( labels , ok ) if o ]

            for w , c in zip ( bad_worlds , bad_cols ) :

                key = ( int ( w ) , agent )

                if key in found :

                    continue

                text = kept_labels [ c ] if kept_labels is not None else ml.render ( frame , kept [ c ] , ( names , dict_cuts ) )

                found [ key ] = ( tuple ( int ( x ) for x in kept [ c ] ) , text )

        if len ( names ) :

            scan ( dict_cuts , ml.cuts_to_mask ( frame , dict_cuts ) , names )

        if first and found :

            break

        try :

            for cuts , mask in ml.iter_batches ( frame , mode , batch , bound ) :

                scan ( cuts , mask )

                if first and found :

                    break

        except ExhaustiveBoundError as err :

            verdict.status = UNSUPPORTED

            verdict.reason = str ( err )

            return verdict

        if first and found :

            break

    if found :

        verdict.status = VIOLATED

        for ( w , agent ) in sorted ( found ) [ : max_witnesses ] :

            cuts , text = found [ ( w , agent ) ]

            world = frame.worlds [ w ]

            verdict.witnesses.append ( Witness ( w , world.run , 'limit' if world.limit else world.depth ,
                                                 agent , cuts , text ) )

    logger.debug ( '%s: %s with %d violating worlds' , pid , verdict.status , len ( found ) )

    return verdict


def recheck_witness ( frame , pid , witness ) :

    """True when the witness still falsifies the template at its world."""

    mask = ml.TSProperty ( witness.cuts ).mask ( frame )

    return not ml.eval_at ( frame , witness.world , template ( pid , witness.agent , frame ) , mask )


def check_program ( program , ctx , pids = PROPERTY_IDS , mode = None , budget = 10000 , bound = 4096 ,
                    exhaustive_bound = 10 ** 7 , ** kwargs ) :

    """Builds the frame of a program and checks several properties. A frame
    that cannot be built yields UNSUPPORTED verdicts. ``bound`` limits the
    initial stores, ``exhaustive_bound`` the candidate properties."""

    try :

        frame = build_frame ( program , ctx , budget , bound )

    except ( UnsupportedDivergenceError , BudgetExceededError ) as err :

        logger.info ( 'frame not representable: %s' , err )

        return [ Verdict ( pid , UNSUPPORTED , mode = _mode_text ( mode ) , reason = str ( err ) ) for pid in pids ]

    return [ check ( frame , pid , mode = mode , bound = exhaustive_bound , ** kwargs ) for pid in pids ]


def check_all ( frame , pids = PROPERTY_IDS , mode = None , ** kwargs ) :

    """Table of verdicts, one row per property, with the first witness."""

    rows = [ ]

    for pid in pids :

        v = check ( frame , pid , mode = mode , ** kwargs )

        first = v.witnesses [ 0 ] if v.witnesses else None

        rows.append ( ( pid , v.status , len ( v.witnesses ) ,
                        None if first is None else frame.describe_world ( first.world ) ,
                        None if first is None else first.rendered ) )

    return pd.DataFrame ( rows , columns = [ 'property' , 'status' , 'witnesses' , 'world' , 'phi' ] )


def check_rd_equivalence ( frame , mode = None , ** kwargs ) :

    """Whether robust declassification and its single knowledge relation
    form agree, verdicts and violating worlds alike. Returns UNSUPPORTED for
    frames with refined knowledge."""

    if not all ( knowledge_unrefined ( frame , a ) for a in frame.ctx.agents ) :

        return UNSUPPORTED

    full = check ( frame , 'RD' , mode = mode , ** kwargs )

    simple = check ( frame , 'RD_SIMPLIFIED' , mode = mode , ** kwargs )

    return ( full.status == simple.status and
             [ ( w.world , w.agent ) for w in full.witnesses ] == [ ( w.world , w.agent ) for w in simple.witnesses ] )


NEEDS_TERMINATION_AND_READ_WRITES = ( 'TI_RD' , 'TI_TE' , 'TRACE_RD' , 'TRACE_TE' )


def audit_theorem_assumptions ( frame , ctx = None , pid = 'TI_RD' ) :

    """Warnings for assumptions the trace equivalence of ``pid`` relies on:
    termination signalling and every written variable being readable."""

    ctx = frame.ctx if ctx is None else ctx

    warnings = [ ]

    if pid not in NEEDS_TERMINATION_AND_READ_WRITES :

        return warnings

    for a in ctx.agents :

        if not ctx.write [ a ] <= ctx.read [ a ] :

            warnings.append ( 'W(%s) not within R(%s): %s' % ( a , a , sorted ( ctx.write [ a ] - ctx.read [ a ] ) ) )

    if not ctx.signals_termination :

        if frame is not None and all ( r.halts for r in frame.runs ) :

            warnings.append ( 'termination not signalled (benign: every run halts)' )

        else :

            warnings.append ( 'termination not signalled' )

    return warnings
