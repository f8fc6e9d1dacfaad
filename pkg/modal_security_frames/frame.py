#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Security frames: the worlds of every run prefix of a program together with
the time relation and, per agent, the knowledge and write relations.

Worlds are ordered by run (initial stores in lexicographic order), then by
depth, with the limit world of a diverging run last. A diverging run is
represented by its explicit prefixes up to its stabilization index plus one
limit world standing for every deeper prefix. In synchronous mode diverging
runs are unrolled up to a common depth beyond the longest halting run so that
step-indexed views of different runs stay comparable.

Relations are boolean numpy matrices indexed by world position.
"""

import copy
import json
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional, Tuple

import numpy as np
import pandas as pd

from .errors import (BudgetExceededError, PolicyError,
                     UnsupportedDivergenceError)
from .frame_utils import (equal_label_matrix, factorize, format_value,
                          gvquote)
from .lang import EVENTS, OUTPUT, evaluate, parse_expr, parse_program
from .tracegen import (BUDGET_EXCEEDED, UNSUPPORTED_DIVERGE, fix, fix_names,
                       limit_entry, marks_limit, unfold_all, view)

logger = logging.getLogger ( __name__ )

RELATIONS = ( 'T' , 'KC' , 'KP' , 'WC' , 'WP' , 'K#' )

PER_VARIABLE = 'per_variable'
EVENT = 'event'


@dataclass ( frozen = True )
class SecurityContext :
    """Agents with the variables they read and write, plus the observation
    flags and the optional declassification and endorsement policy."""
    agents : Tuple [ str , ... ]
    read : Dict [ str , FrozenSet [ str ] ] = field ( hash = False )
    write : Dict [ str , FrozenSet [ str ] ] = field ( hash = False )
    signals_termination : bool = False
    synchronous : bool = False
    declass : Dict [ str , str ] = field ( default_factory = dict , hash = False )
    endorse_mode : Optional [ str ] = None
    endorse : Dict [ str , FrozenSet [ str ] ] = field ( default_factory = dict , hash = False )


def make_context ( read , write = None , signals_termination = False , synchronous = False ,
                   declass = None , endorse_mode = None , endorse = None , agent = 'A' ) :

    """Builds a SecurityContext. ``read``, ``write`` and ``endorse`` are either
    dicts keyed by agent or plain collections of variable names for a single
    agent called ``agent``.
    """

    def per_agent ( value ) :

        if value is None :

            return { }

        if isinstance ( value , dict ) :

            return { a : frozenset ( v ) for a , v in value.items ( ) }

        return { agent : frozenset ( value ) }

    read = per_agent ( read )

    write = per_agent ( write )

    agents = tuple ( dict.fromkeys ( list ( read ) + list ( write ) ) ) or ( agent , )

    for a in agents :

        read.setdefault ( a , frozenset ( ) )

        write.setdefault ( a , frozenset ( ) )

    if declass is not None and not isinstance ( declass , dict ) :

        declass = { agent : declass }

    if endorse_mode not in ( None , PER_VARIABLE , EVENT ) :

        raise PolicyError ( 'unknown endorsement mode %r' % endorse_mode )

    return SecurityContext ( agents = agents , read = read , write = write ,
                             signals_termination = bool ( signals_termination ) ,
                             synchronous = bool ( synchronous ) , declass = declass or { } ,
                             endorse_mode = endorse_mode , endorse = per_agent ( endorse ) )


def context_from_dict ( policy ) :

    """Reads a policy dict with keys ``agents``, ``read``, ``write``,
    ``domains``, ``flags``, ``declass`` and ``endorse``.

    Returns
    -------
    ctx : SecurityContext
    domains : dict
    """

    try :

        read = policy [ 'read' ]

    except KeyError :

        raise PolicyError ( 'policy has no read sets' )

    flags = policy.get ( 'flags' , { } )

    endorse = policy.get ( 'endorse' ) or { }

    mode = endorse.get ( 'mode' )

    ctx = make_context ( read , policy.get ( 'write' , { } ) ,
                         signals_termination = policy.get ( 'signals_termination' ,
                                                            flags.get ( 'signals_termination' , False ) ) ,
                         synchronous = policy.get ( 'synchronous' , flags.get ( 'synchronous' , False ) ) ,
                         declass = policy.get ( 'declass' ) ,
                         endorse_mode = None if mode in ( None , 'none' ) else mode ,
                         endorse = endorse.get ( 'variables' ) )

    for a in policy.get ( 'agents' , [ ] ) :

        if a not in ctx.agents :

            raise PolicyError ( 'agent %s has no read set' % a )

    domains = { }

    for name , values in policy.get ( 'domains' , { } ).items ( ) :

        if isinstance ( values , dict ) :

            values = range ( values [ 'min' ] , values [ 'max' ] + 1 )

        domains [ name ] = tuple ( values )

    return ctx , domains


def load_policy ( path ) :

    with open ( path ) as f :

        return context_from_dict ( json.load ( f ) )


def validate_context ( program , ctx ) :

    for a in ctx.agents :

        for kind , names in ( ( 'read' , ctx.read [ a ] ) , ( 'write' , ctx.write [ a ] ) ,
                              ( 'endorse' , ctx.endorse.get ( a , ( ) ) ) ) :

            missing = set ( names ) - set ( program.vars )

            if missing :

                raise PolicyError ( '%s set of %s names unknown variables %s' % ( kind , a , sorted ( missing ) ) )

    if ctx.endorse_mode == EVENT and EVENTS not in program.vars :

        raise PolicyError ( 'event endorsement needs a program with endorse statements' )


@dataclass ( frozen = True )
class World :
    run : int
    depth : int
    limit : bool = False

    def __str__ ( self ) :

        return 'run %d @ %s' % ( self.run , 'limit' if self.limit else self.depth )


class SecurityFrame ( object ) :

    """Worlds and relations of a program under a security context. Built by
    ``build_frame``; the refinement functions return modified copies.
    """

    def __init__ ( self , program , ctx , runs ) :

        self.program = program

        self.ctx = ctx

        self.runs = list ( runs )

        self.relations = { }

        self._weights = { }

    # ----------------------------------------------------------- construction

    def make_worlds ( self ) :

        halted_depths = [ len ( r.configs ) - 1 for r in self.runs if r.halts ]

        longest = max ( halted_depths ) if halted_depths else 0

        stabilized = [ r.stabilization for r in self.runs if r.diverges ]

        self.horizon = max ( [ longest + 1 ] + stabilized )

        self.worlds = [ ]

        self.configs = [ ]

        self.sizes = [ ]

        for r in self.runs :

            if r.halts :

                depths = range ( len ( r.configs ) )

            else :

                depths = range ( self.horizon if self.ctx.synchronous else r.stabilization )

            for d in depths :

                self.worlds.append ( World ( r.index , d ) )

                self.configs.append ( r.config_at ( d ) )

            if r.diverges :

                self.worlds.append ( World ( r.index , len ( depths ) , limit = True ) )

                self.configs.append ( r.config_at ( len ( depths ) ) )

            self.sizes.append ( len ( depths ) + ( 1 if r.diverges else 0 ) )

        self.sizes = np.asarray ( self.sizes , dtype = np.int64 )

        self.offsets = np.concatenate ( [ [ 0 ] , np.cumsum ( self.sizes ) [ : -1 ] ] ).astype ( np.int64 )

        self.run_of = np.asarray ( [ w.run for w in self.worlds ] , dtype = np.int64 )

        self.pos = np.arange ( len ( self.worlds ) ) - self.offsets [ self.run_of ]

        self.is_limit = np.asarray ( [ w.limit for w in self.worlds ] , dtype = bool )

        self.is_initial = self.pos == 0

        self.halted = np.asarray ( [ c.halted for c in self.configs ] , dtype = bool )

        logger.debug ( '%d worlds over %d runs' , len ( self.worlds ) , len ( self.runs ) )

    def _prefixes ( self ) :

        """Configurations of the prefix ending at each world."""

        for r , o , n in zip ( self.runs , self.offsets , self.sizes ) :

            prefix = [ ]

            for k in range ( n ) :

                prefix.append ( self.configs [ o + k ] )

                yield r , k , list ( prefix )

    def make_time ( self ) :

        same_run = self.run_of [ : , None ] == self.run_of [ None , : ]

        self._set ( 'T' , None , same_run & ( self.pos [ None , : ] >= self.pos [ : , None ] ) )

    def _view_key ( self , agent , prefix , limit ) :

        if limit and marks_limit ( self.ctx ) :

            closing = limit_entry ( self.program , self.ctx , agent , prefix [ -1 ] )

            return view ( self.program , self.ctx , agent , prefix [ : -1 ] ) + ( closing , )

        return view ( self.program , self.ctx , agent , prefix )

    def make_knowledge ( self ) :

        self.view_keys = { }

        for a in self.ctx.agents :

            keys = [ self._view_key ( a , prefix , self.is_limit [ self.offsets [ r.index ] + k ] )
                     for r , k , prefix in self._prefixes ( ) ]

            self.view_keys [ a ] = keys

            known = equal_label_matrix ( factorize ( keys ) )

            self._set ( 'KC' , a , known )

            self._set ( 'KP' , a , known )

            lengths = np.asarray ( [ len ( k ) for k in keys ] )

            counted = lengths [ : , None ] == lengths [ None , : ]

            if self.ctx.signals_termination :

                counted &= self.halted [ : , None ] == self.halted [ None , : ]

            self._set ( 'K#' , a , counted )

    def fix_key ( self , agent , exclude = ( ) ) :

        """Fix of the prefix ending at each world."""

        return [ fix ( self.program , self.ctx , agent , prefix , exclude ) for _ , _ , prefix in self._prefixes ( ) ]

    def make_writes ( self ) :

        """Permitted writes relate worlds with equal fixes. Compatible
        writes relate worlds where the agent has seen nothing but the initial
        store and whose runs start from the same unwritable values."""

        self.fix_keys = { }

        eye = np.eye ( self.n_worlds , dtype = bool )

        for a in self.ctx.agents :

            keys = self.fix_key ( a )

            self.fix_keys [ a ] = keys

            start = factorize ( keys ) [ self.offsets [ self.run_of ] ]

            fresh = np.asarray ( [ len ( k ) == 1 for k in self.view_keys [ a ] ] , dtype = bool )

            compatible = fresh [ : , None ] & fresh [ None , : ] & ( start [ : , None ] == start [ None , : ] )

            self._set ( 'WC' , a , compatible | eye )

            self._set ( 'WP' , a , equal_label_matrix ( factorize ( keys ) ) )

    # ----------------------------------------------------------------- access

    def _set ( self , name , agent , matrix ) :

        matrix = np.array ( matrix , dtype = bool )

        matrix.setflags ( write = False )

        self.relations [ ( name , None if name == 'T' else agent ) ] = matrix

        self._weights = { }

    def weights ( self , name , agent = None ) :

        """Float32 copy of a relation for matrix products, cached per frame."""

        key = ( name , None if name == 'T' else agent )

        if key not in self._weights :

            self._weights [ key ] = self.relation ( name , agent ).astype ( np.float32 )

        return self._weights [ key ]

    def relation ( self , name , agent = None ) :

        """Boolean world by world matrix of a relation."""

        if name not in RELATIONS :

            raise KeyError ( 'unknown relation %s' % name )

        return self.relations [ ( name , None if name == 'T' else agent ) ]

    def with_relation ( self , name , agent , matrix ) :

        other = copy.copy ( self )

        other.relations = dict ( self.relations )

        other._set ( name , agent , matrix )

        return other

    @property
    def n_worlds ( self ) :

        return len ( self.worlds )

    def world_index ( self , run , depth ) :

        """Position of the world of ``run`` at ``depth``, the limit world
        answering for every depth past the explicit ones."""

        return int ( self.offsets [ run ] + min ( depth , self.sizes [ run ] - 1 ) )

    def describe_world ( self , i ) :

        store = self.runs [ self.run_of [ i ] ].initial

        init = ','.join ( '%s=%s' % ( v , format_value ( x ) ) for v , x in zip ( self.program.vars , store )
                          if v in self.program.user_vars )

        return '(%s) %s' % ( init , 'limit' if self.is_limit [ i ] else 'depth %d' % self.pos [ i ] )


def build_frame ( program , ctx , budget = 10000 , bound = 4096 ) :

    """Unfolds every run of a program and builds its security frame, applying
    the declassification and endorsement policy of the context.

    Parameters
    ----------
    program : Program
    ctx : SecurityContext
    budget : int
        step budget per run
    bound : int
        maximum number of initial stores

    Returns
    -------
    frame : SecurityFrame

    Raises
    ------
    PolicyError
        read or write sets naming unknown variables
    UnsupportedDivergenceError
        a run cycles through changing stores
    BudgetExceededError
        a run neither halts nor cycles within the budget
    """

    validate_context ( program , ctx )

    runs = unfold_all ( program , budget , bound )

    for r in runs :

        if r.status == UNSUPPORTED_DIVERGE :

            raise UnsupportedDivergenceError ( 'run from %s diverges through changing stores' % ( r.initial , ) , run = r )

        if r.status == BUDGET_EXCEEDED :

            raise BudgetExceededError ( 'run from %s exceeds %d steps' % ( r.initial , budget ) )

    frame = SecurityFrame ( program , ctx , runs )

    frame.make_worlds ( )

    frame.make_time ( )

    frame.make_knowledge ( )

    frame.make_writes ( )

    for a , psi in ctx.declass.items ( ) :

        frame = refine_declassification ( frame , a , psi )

    if ctx.endorse_mode is not None :

        for a in ctx.agents :

            frame = refine_endorsement ( frame , a , ctx.endorse_mode , ctx.endorse.get ( a , ( ) ) )

    return frame


def refine_declassification ( frame , agent , psi ) :

    """Restricts the permitted knowledge of ``agent`` to worlds whose runs
    agree on the declassified expression ``psi`` over initial values.

    Parameters
    ----------
    psi : str or expression
    """

    if isinstance ( psi , str ) :

        psi = parse_expr ( psi )

    values = np.asarray ( [ evaluate ( psi , frame.runs [ r ].initial , frame.program ) for r in frame.run_of ] )

    refined = frame.relation ( 'KP' , agent ) & ( values [ : , None ] == values [ None , : ] )

    return frame.with_relation ( 'KP' , agent , refined )


def _event_relation ( frame , agent ) :

    names = fix_names ( frame.program , frame.ctx , agent )

    cols = [ i for i , v in enumerate ( frame.program.vars ) if v in names ]

    events = frame.program.index [ EVENTS ]

    labels = [ factorize ( [ c.store [ i ] for c in frame.configs ] ) for i in cols ]

    values = np.stack ( labels , axis = 1 ) if labels else np.zeros ( ( frame.n_worlds , 0 ) , dtype = np.int64 )

    endorsed = np.asarray ( [ [ ( agent , frame.program.vars [ i ] ) in c.store [ events ] for i in cols ]
                              for c in frame.configs ] , dtype = bool ).reshape ( frame.n_worlds , len ( cols ) )

    related = np.zeros ( ( frame.n_worlds , frame.n_worlds ) , dtype = bool )

    groups = { }

    for i in range ( frame.n_worlds ) :

        groups.setdefault ( ( int ( frame.pos [ i ] ) , bool ( frame.is_limit [ i ] ) ) , [ ] ).append ( i )

    for ( length , _ ) , members in groups.items ( ) :

        # one step-indexed history per member
        hist = np.stack ( [ values [ frame.offsets [ frame.run_of [ i ] ] : i + 1 ] for i in members ] )

        ends = np.stack ( [ endorsed [ frame.offsets [ frame.run_of [ i ] ] : i + 1 ] for i in members ] )

        ok = ( hist [ : , None ] == hist [ None , : ] ) | ( ends [ : , None ] & ends [ None , : ] )

        block = ok.all ( axis = ( 2 , 3 ) )

        related [ np.ix_ ( members , members ) ] = block

    return related


def refine_endorsement ( frame , agent , mode , names = ( ) ) :

    """Widens the permitted write relation of ``agent``.

    ``per_variable`` ignores the endorsed variables when comparing fixes.
    ``event`` compares step-indexed fixes, forgiving a difference in a
    variable at a step where both runs have recorded an endorsement of it.
    """

    if mode == PER_VARIABLE :

        keys = frame.fix_key ( agent , exclude = names )

        return frame.with_relation ( 'WP' , agent , equal_label_matrix ( factorize ( keys ) ) )

    if mode == EVENT :

        if EVENTS not in frame.program.vars :

            raise PolicyError ( 'event endorsement needs a program with endorse statements' )

        return frame.with_relation ( 'WP' , agent , _event_relation ( frame , agent ) )

    raise PolicyError ( 'unknown endorsement mode %r' % mode )


def counting_relation ( frame , agent ) :

    """Relates worlds whose views have equal length."""

    return frame.relation ( 'K#' , agent )


def _first_pair ( mask ) :

    found = np.argwhere ( mask )

    return tuple ( int ( x ) for x in found [ 0 ] ) if len ( found ) else None


def check_frame_properties ( frame ) :

    """Checks commutation of write and knowledge, perfect recall, unique world
    identities and termination signalling.

    Returns
    -------
    report : pandas.DataFrame
        one row per property and agent with columns ``property``, ``agent``,
        ``holds`` and ``counterexample`` (a pair of world positions or None)
    """

    rows = [ ]

    t = frame.relation ( 'T' ).astype ( np.int64 )

    unique = len ( set ( frame.worlds ) ) == frame.n_worlds

    for a in frame.ctx.agents :

        k = frame.relation ( 'KC' , a ).astype ( np.int64 )

        w = frame.relation ( 'WC' , a ).astype ( np.int64 )

        wk = ( w @ k ) > 0

        kw = ( k @ w ) > 0

        bad = _first_pair ( wk != kw )

        rows.append ( ( 'commutation' , a , bad is None , bad ) )

        recall = ( ( t @ k ) > 0 ) & ~ ( ( k @ t ) > 0 )

        bad = _first_pair ( recall )

        rows.append ( ( 'perfect_recall' , a , bad is None , bad ) )

        rows.append ( ( 'unique_worlds' , a , unique , None ) )

        leak = k.astype ( bool ) & frame.halted [ : , None ] & ~ frame.halted [ None , : ]

        bad = _first_pair ( leak )

        rows.append ( ( 'signals_termination' , a , bad is None , bad ) )

    return pd.DataFrame ( rows , columns = [ 'property' , 'agent' , 'holds' , 'counterexample' ] )


def _dot_lines ( frame , agent , relation ) :

    yield 'digraph frame {'

    yield '  rankdir=LR;'

    yield '  node [shape=box, fontsize=10];'

    labels = factorize ( frame.view_keys [ agent ] ) if relation in ( 'KC' , 'KP' ) else factorize ( frame.fix_keys [ agent ] )

    for c in np.unique ( labels ) :

        yield '  subgraph cluster_%d {' % c

        yield '    style=rounded;'

        for i in np.flatnonzero ( labels == c ) :

            store = ' '.join ( '%s=%s' % ( v , format_value ( x ) )
                               for v , x in zip ( frame.program.vars , frame.configs [ i ].store )
                               if v in frame.program.user_vars )

            tag = ' ⇓' if frame.halted [ i ] else ( ' ∞' if frame.is_limit [ i ] else '' )

            yield '    w%d [label=%s];' % ( i , gvquote ( store + tag ) )

        yield '  }'

    for i in range ( frame.n_worlds - 1 ) :

        if frame.run_of [ i ] == frame.run_of [ i + 1 ] :

            yield '  w%d -> w%d;' % ( i , i + 1 )

    if relation in ( 'WC' , 'WP' ) :

        m = frame.relation ( relation , agent )

        for i , j in np.argwhere ( m ) :

            if i < j :

                yield '  w%d -> w%d [dir=none, style=dashed, color=red];' % ( i , j )

    yield '}'


def export_dot ( frame , agent = None , relation = 'KC' ) :

    """Graphviz text of the frame: one cluster per class of the chosen
    relation (knowledge or fix classes), time edges between consecutive
    worlds, and write edges dashed when a write relation is chosen."""

    agent = frame.ctx.agents [ 0 ] if agent is None else agent

    return '\n'.join ( _dot_lines ( frame , agent , relation ) ) + '\n'


def _pairs ( matrix ) :

    return [ [ int ( i ) , int ( j ) ] for i , j in np.argwhere ( matrix ) ]


def export_json ( frame ) :

    """Plain dict of the program, the context and every relation as a list of
    world position pairs."""

    ctx = frame.ctx

    return {
        'program' : frame.program.text ,
        'domains' : { v : [ list ( x ) if isinstance ( x , ( tuple , frozenset ) ) else x for x in d ]
                      for v , d in frame.program.domains.items ( ) if v not in ( OUTPUT , EVENTS ) } ,
        'policy' : {
            'agents' : list ( ctx.agents ) ,
            'read' : { a : sorted ( ctx.read [ a ] ) for a in ctx.agents } ,
            'write' : { a : sorted ( ctx.write [ a ] ) for a in ctx.agents } ,
            'flags' : { 'signals_termination' : ctx.signals_termination , 'synchronous' : ctx.synchronous } ,
            'declass' : dict ( ctx.declass ) ,
            'endorse' : { 'mode' : ctx.endorse_mode , 'variables' : { a : sorted ( v ) for a , v in ctx.endorse.items ( ) } }
                        if ctx.endorse_mode else None ,
        } ,
        'worlds' : [ { 'run' : w.run , 'depth' : w.depth , 'limit' : w.limit } for w in frame.worlds ] ,
        'relations' : { '%s:%s' % ( name , agent or '' ) : _pairs ( m ) for ( name , agent ) , m in frame.relations.items ( ) } ,
    }


def import_json ( data , budget = 10000 , bound = 4096 ) :

    """Rebuilds a frame from ``export_json`` output. Stored relations replace
    the computed ones, so hand-edited frames can be checked as well."""

    ctx , domains = context_from_dict ( data [ 'policy' ] )

    program = parse_program ( data [ 'program' ] , domains = data.get ( 'domains' , domains ) )

    frame = build_frame ( program , ctx , budget , bound )

    if len ( data.get ( 'worlds' , frame.worlds ) ) != frame.n_worlds :

        raise PolicyError ( 'stored worlds do not match the program' )

    for key , pairs in data.get ( 'relations' , { } ).items ( ) :

        name , _ , agent = key.partition ( ':' )

        m = np.zeros ( ( frame.n_worlds , frame.n_worlds ) , dtype = bool )

        for i , j in pairs :

            m [ i , j ] = True

        frame = frame.with_relation ( name , agent or None , m )

    return frame
