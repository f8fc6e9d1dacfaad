#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Unfolds every initial store of a program into a finite run and computes the
observations agents make of run prefixes.

A run either halts, or revisits a configuration. A revisit is a silent
divergence when the store no longer changes around the cycle and an
unsupported divergence otherwise. Runs are cut off after the step budget.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import StoreBoundError, StuckError
from .frame_utils import destutter
from .lang import HALT, Config, initial_config, step

logger = logging.getLogger ( __name__ )

HALTED = 'HALTED'
SILENT_DIVERGE = 'SILENT_DIVERGE'
UNSUPPORTED_DIVERGE = 'UNSUPPORTED_DIVERGE'
BUDGET_EXCEEDED = 'BUDGET_EXCEEDED'

LIMIT = 'LIMIT'


@dataclass ( frozen = True )
class Run :
    """Finite representation of one execution.

    ``configs`` holds depths ``0 .. stabilization - 1``. For a diverging run
    the configurations from ``cycle_start`` on repeat forever, and every depth
    from ``stabilization`` on has the store of the cycle.
    """
    index : int
    initial : Tuple
    configs : Tuple [ Config , ... ]
    status : str
    stabilization : Optional [ int ] = None
    cycle_start : Optional [ int ] = None
    stuck : bool = False

    @property
    def halts ( self ) :

        return self.status == HALTED

    @property
    def diverges ( self ) :

        return self.status in ( SILENT_DIVERGE , UNSUPPORTED_DIVERGE )

    def config_at ( self , depth ) :

        """Configuration at any depth, unrolling the cycle of a diverging run
        and repeating the final configuration of a halted one."""

        n = len ( self.configs )

        if depth < n :

            return self.configs [ depth ]

        if self.diverges :

            e = self.cycle_start

            return self.configs [ e + ( depth - e ) % ( n - e ) ]

        return self.configs [ -1 ]


def count_initial_stores ( program ) :

    return int ( np.prod ( [ len ( program.domains [ v ] ) for v in program.vars ] , dtype = np.int64 ) )


def enumerate_initial_stores ( program , bound = 4096 ) :

    """Every initial store, lexicographic in variable order.

    Raises
    ------
    StoreBoundError
        if there are more than ``bound`` of them
    """

    count = count_initial_stores ( program )

    if count > bound :

        raise StoreBoundError ( '%d initial stores exceed the bound of %d' % ( count , bound ) )

    return [ tuple ( s ) for s in itertools.product ( * [ program.domains [ v ] for v in program.vars ] ) ]


def unfold_run ( program , initial , budget = 10000 , index = 0 ) :

    """Steps a program from an initial store until it halts, revisits a
    configuration or exhausts the budget.

    Parameters
    ----------
    program : Program
    initial : tuple
        initial store, in ``program.vars`` order
    budget : int
        maximum number of steps
    index : int
        position of the run in the enumeration of initial stores

    Returns
    -------
    run : Run
    """

    configs = [ initial_config ( program , initial ) ]

    seen = { configs [ 0 ] : 0 }

    stuck = False

    while True :

        current = configs [ -1 ]

        if current.halted :

            return Run ( index , tuple ( initial ) , tuple ( configs ) , HALTED ,
                         stabilization = len ( configs ) , stuck = stuck )

        if len ( configs ) > budget :

            logger.info ( 'run %d exceeded the budget of %d steps' , index , budget )

            return Run ( index , tuple ( initial ) , tuple ( configs ) , BUDGET_EXCEEDED )

        try :

            nxt = step ( program , current )

        except StuckError :

            nxt = Config ( HALT , current.store )

            stuck = True

        if nxt in seen :

            start = seen [ nxt ]

            silent = all ( c.store == nxt.store for c in configs [ start : ] )

            status = SILENT_DIVERGE if silent else UNSUPPORTED_DIVERGE

            if not silent :

                logger.info ( 'run %d cycles through changing stores' , index )

            return Run ( index , tuple ( initial ) , tuple ( configs ) , status ,
                         stabilization = len ( configs ) , cycle_start = start )

        seen [ nxt ] = len ( configs )

        configs.append ( nxt )


def unfold_all ( program , budget = 10000 , bound = 4096 ) :

    runs = [ unfold_run ( program , s , budget , i )
             for i , s in enumerate ( enumerate_initial_stores ( program , bound ) ) ]

    logger.debug ( 'unfolded %d runs' , len ( runs ) )

    return runs


def project ( program , store , names ) :

    """Values of ``names`` in a store, in program variable order."""

    return tuple ( value for var , value in zip ( program.vars , store ) if var in names )


def _entry ( program , ctx , agent , config , depth ) :

    obs = project ( program , config.store , ctx.read [ agent ] )

    if ctx.signals_termination :

        obs = ( obs , config.halted )

    if ctx.synchronous :

        obs = ( depth , obs )

    return obs


def marks_limit ( ctx ) :

    """Whether the limit world of a diverging run is told apart from its
    prefixes: time is observable or termination is signalled."""

    return ctx.synchronous or ctx.signals_termination


def limit_entry ( program , ctx , agent , config ) :

    obs = project ( program , config.store , ctx.read [ agent ] )

    if ctx.signals_termination :

        obs = ( obs , config.halted )

    return ( LIMIT , obs )


def view ( program , ctx , agent , configs ) :

    """What an agent observes of a run prefix: the destuttered projection onto
    its readable variables, with a halt flag when termination is observable
    and a step index in synchronous mode."""

    return destutter ( _entry ( program , ctx , agent , c , k ) for k , c in enumerate ( configs ) )


def fix_names ( program , ctx , agent , exclude = ( ) ) :

    return frozenset ( v for v in program.vars if v not in ctx.write [ agent ] and v not in exclude )


def fix ( program , ctx , agent , configs , exclude = ( ) , destuttered = True ) :

    """Projection of a run prefix onto the variables the agent cannot write,
    with the halt flag when termination is signalled.

    Parameters
    ----------
    exclude : iterable of str
        further variables dropped from the projection
    destuttered : bool
        False keeps one entry per step
    """

    names = fix_names ( program , ctx , agent , exclude )

    entries = ( project ( program , c.store , names ) for c in configs )

    if ctx.signals_termination :

        entries = ( ( e , c.halted ) for e , c in zip ( entries , configs ) )

    return destutter ( entries ) if destuttered else tuple ( entries )


def maximal_view ( program , ctx , agent , run , horizon = None ) :

    """Observation of a whole run. A diverging run is closed with a limit
    marker when termination is signalled or time is observable, and in
    synchronous mode it is unrolled up to ``horizon`` first."""

    if not ( run.diverges and marks_limit ( ctx ) ) :

        return view ( program , ctx , agent , run.configs )

    if ctx.synchronous :

        horizon = run.stabilization if horizon is None else max ( horizon , run.stabilization )

    else :

        horizon = run.stabilization

    configs = [ run.config_at ( d ) for d in range ( horizon ) ]

    return view ( program , ctx , agent , configs ) + ( limit_entry ( program , ctx , agent , run.config_at ( horizon ) ) , )


def maximal_fix ( program , ctx , agent , run ) :

    return fix ( program , ctx , agent , run.configs )
