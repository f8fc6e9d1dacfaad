#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Modal formulae over security frames and temporally sound properties.

A temporally sound property is a set of worlds closed under the time
relation. Since time is a disjoint union of finite chains (one per run), such
a set is given by one cut per run: the run's worlds at positions ``>= cut``.
A cut equal to the number of worlds of the run selects none of them.

Formulae are evaluated for many candidate properties at once: a candidate
batch is a boolean matrix with one column per property, and every
subformula evaluates to a matrix of the same shape. Boxes and diamonds become
matrix products with the relation.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import more_itertools as mit
import numpy as np
from lark import Lark, Transformer
from lark.exceptions import UnexpectedInput

from .errors import (ExhaustiveBoundError, NotTemporallySoundError,
                     UnsupportedAtomError)

logger = logging.getLogger ( __name__ )

EXHAUSTIVE = 'exhaustive'
RUNSET = 'runset'


# ------------------------------------------------------------------- formulae

@dataclass ( frozen = True )
class TSProperty :
    """Per-run cuts of a temporally sound world set."""
    cuts : Tuple [ int , ... ]

    def mask ( self , frame ) :

        return cuts_to_mask ( frame , np.asarray ( [ self.cuts ] ) ) [ : , 0 ]


@dataclass ( frozen = True )
class Phi :
    """Placeholder for the quantified property of a template."""


@dataclass ( frozen = True )
class SetAtom :
    prop : TSProperty


@dataclass ( frozen = True )
class ValueAtom :
    """``var@depth=value``"""
    var : str
    depth : int
    value : object


@dataclass ( frozen = True )
class Halted :
    pass


@dataclass ( frozen = True )
class Top :
    pass


@dataclass ( frozen = True )
class Not :
    operand : object


@dataclass ( frozen = True )
class And :
    left : object
    right : object


@dataclass ( frozen = True )
class Or :
    left : object
    right : object


@dataclass ( frozen = True )
class Implies :
    left : object
    right : object


@dataclass ( frozen = True )
class Box :
    rel : str
    agent : Optional [ str ]
    body : object


@dataclass ( frozen = True )
class Dia :
    rel : str
    agent : Optional [ str ]
    body : object


def always ( f ) :

    return Box ( 'T' , None , f )


def eventually ( f ) :

    return Dia ( 'T' , None , f )


def conj ( * fs ) :

    result = fs [ 0 ]

    for f in fs [ 1 : ] :

        result = And ( result , f )

    return result


def bottom ( ) :

    return Not ( Top ( ) )


# ----------------------------------------------------------------- evaluation

def cuts_to_mask ( frame , cuts ) :

    """World by candidate membership matrix of an (M, runs) cut array."""

    cuts = np.asarray ( cuts , dtype = np.int64 )

    return frame.pos [ : , None ] >= cuts [ : , frame.run_of ].T


def _value_atom ( frame , atom ) :

    if atom.var not in frame.program.index :

        raise UnsupportedAtomError ( 'unknown variable %s' % atom.var )

    i = frame.program.index [ atom.var ]

    out = np.zeros ( frame.n_worlds , dtype = bool )

    for r , o , n in zip ( frame.runs , frame.offsets , frame.sizes ) :

        explicit = n - 1 if r.diverges else n

        if r.diverges and atom.depth >= explicit :

            raise UnsupportedAtomError ( '%s@%d reaches past the stabilization of run %d'
                                         % ( atom.var , atom.depth , r.index ) )

        if atom.depth >= n :

            continue

        if r.config_at ( atom.depth ).store [ i ] == atom.value :

            out [ o + atom.depth : o + n ] = True

    return out


def _eval ( frame , f , phi ) :

    if isinstance ( f , Phi ) :

        if phi is None :

            raise ValueError ( 'template evaluated without a property' )

        return phi

    if isinstance ( f , Top ) :

        return np.ones ( ( frame.n_worlds , 1 ) , dtype = bool )

    if isinstance ( f , Halted ) :

        return frame.halted [ : , None ]

    if isinstance ( f , SetAtom ) :

        return f.prop.mask ( frame ) [ : , None ]

    if isinstance ( f , ValueAtom ) :

        return _value_atom ( frame , f ) [ : , None ]

    if isinstance ( f , Not ) :

        return ~ _eval ( frame , f.operand , phi )

    if isinstance ( f , ( And , Or , Implies ) ) :

        left = _eval ( frame , f.left , phi )

        right = _eval ( frame , f.right , phi )

        if isinstance ( f , And ) :

            return left & right

        if isinstance ( f , Or ) :

            return left | right

        return ~ left | right

    if isinstance ( f , ( Box , Dia ) ) :

        rel = frame.weights ( f.rel , f.agent )

        body = _eval ( frame , f.body , phi )

        if isinstance ( f , Box ) :

            return ( rel @ ( ~ body ).astype ( np.float32 ) ) == 0

        return ( rel @ body.astype ( np.float32 ) ) > 0

    raise TypeError ( 'not a formula: %r' % ( f , ) )


def evaluate ( frame , formula , phi = None ) :

    """Truth of a formula at every world.

    Parameters
    ----------
    frame : SecurityFrame
    formula : formula
    phi : array of bool or None
        candidate properties for the ``Phi`` placeholder, one column each

    Returns
    -------
    array of bool
        shape ``(n_worlds,)`` without ``phi`` or for a 1-d ``phi``, else
        ``(n_worlds, n_candidates)``
    """

    flat = phi is None or np.ndim ( phi ) == 1

    if phi is not None and np.ndim ( phi ) == 1 :

        phi = np.asarray ( phi , dtype = bool ) [ : , None ]

    out = _eval ( frame , formula , phi )

    out = np.broadcast_to ( out , ( frame.n_worlds , 1 if phi is None else phi.shape [ 1 ] ) )

    return out [ : , 0 ] if flat else np.array ( out )


def eval_at ( frame , world , formula , phi = None ) :

    """Truth of a formula at one world position."""

    return bool ( evaluate ( frame , formula , phi ) [ world ] )


# ---------------------------------------------------------------- enumeration

def exhaustive_count ( frame ) :

    return int ( np.prod ( frame.sizes + 1 , dtype = np.float64 ) )


def parse_mode ( text , default_k = 2 ) :

    """``exhaustive`` or ``runset:K`` into a ``(kind, k)`` mode."""

    if text is None :

        return ( RUNSET , default_k )

    if isinstance ( text , tuple ) :

        return text

    if text == EXHAUSTIVE :

        return ( EXHAUSTIVE , None )

    kind , _ , k = text.partition ( ':' )

    if kind != RUNSET :

        raise ValueError ( 'unknown search mode %s' % text )

    return ( RUNSET , int ( k ) if k else default_k )


def enumerate_ts ( frame , mode = ( RUNSET , 2 ) , bound = 10 ** 7 ) :

    """Stream of cut tuples.

    ``exhaustive`` yields every cut vector once, in lexicographic order.
    ``runset:K`` yields every vector in which at most K runs are cut strictly
    inside, grouped by the set of such runs.

    Raises
    ------
    ExhaustiveBoundError
    """

    kind , k = parse_mode ( mode )

    sizes = [ int ( n ) for n in frame.sizes ]

    if kind == EXHAUSTIVE :

        count = exhaustive_count ( frame )

        if count > bound :

            raise ExhaustiveBoundError ( '%d candidate properties exceed the bound of %d' % ( count , bound ) )

        yield from itertools.product ( * [ range ( n + 1 ) for n in sizes ] )

        return

    inner = [ r for r , n in enumerate ( sizes ) if n > 1 ]

    for j in range ( k + 1 ) :

        for partial in itertools.combinations ( inner , j ) :

            choices = [ range ( 1 , n ) if r in partial else ( 0 , n ) for r , n in enumerate ( sizes ) ]

            yield from itertools.product ( * choices )


def iter_batches ( frame , mode = ( RUNSET , 2 ) , size = 4096 , bound = 10 ** 7 ) :

    """Candidate properties in batches of ``(cuts, mask)`` with ``cuts`` an
    (M, runs) array and ``mask`` the matching (worlds, M) membership."""

    for chunk in mit.chunked ( enumerate_ts ( frame , mode , bound ) , size ) :

        cuts = np.asarray ( chunk , dtype = np.int64 ).reshape ( len ( chunk ) , len ( frame.runs ) )

        yield cuts , cuts_to_mask ( frame , cuts )


# -------------------------------------------------------------- extensions

def atom_extension ( frame , formula ) :

    """The temporally sound property a formula denotes.

    Raises
    ------
    NotTemporallySoundError
        if the formula's truth set is not closed under time
    """

    truth = evaluate ( frame , formula )

    cuts = [ ]

    for r , o , n in zip ( frame.runs , frame.offsets , frame.sizes ) :

        seg = truth [ o : o + n ]

        first = int ( np.argmax ( seg ) ) if seg.any ( ) else int ( n )

        if not seg [ first : ].all ( ) :

            raise NotTemporallySoundError ( 'formula is not closed under time on run %d' % r.index )

        cuts.append ( first )

    return TSProperty ( tuple ( cuts ) )


def _closed ( frame , rel , mask ) :

    hit = np.zeros ( ( len ( frame.runs ) , mask.shape [ 1 ] ) , dtype = bool )

    np.logical_or.at ( hit , frame.run_of , mask )

    diamond = hit [ frame.run_of ]

    escapes = ( rel @ ( ~ diamond ).astype ( np.float32 ) ) > 0

    return ~ np.any ( diamond & escapes , axis = 0 )


def write_stable_mask ( frame , agent , mask ) :

    """Per candidate column: is the eventually-closure closed under the
    agent's compatible write steps."""

    return _closed ( frame , frame.weights ( 'WC' , agent ) , mask )


def read_stable_mask ( frame , agent , mask ) :

    return _closed ( frame , frame.weights ( 'KC' , agent ) , mask )


def _as_mask ( frame , prop ) :

    if isinstance ( prop , TSProperty ) :

        return prop.mask ( frame ) [ : , None ]

    return np.asarray ( prop , dtype = bool ).reshape ( frame.n_worlds , -1 )


def is_write_stable ( frame , agent , prop ) :

    return bool ( write_stable_mask ( frame , agent , _as_mask ( frame , prop ) ) [ 0 ] )


def is_read_stable ( frame , agent , prop ) :

    return bool ( read_stable_mask ( frame , agent , _as_mask ( frame , prop ) ) [ 0 ] )


# ------------------------------------------------------------------ rendering

def _literals ( frame ) :

    for v in sorted ( frame.program.user_vars ) :

        for x in frame.program.domains [ v ] :

            yield '%s@0=%s' % ( v , x ) , ValueAtom ( v , 0 , x )


def witness_dictionary ( frame ) :

    """Readable names for whole-run properties: single time-0 literals,
    then disjunctions and conjunctions of two literals over distinct
    variables. Returns ``(names, cuts)`` with one row of ``cuts`` per name,
    keeping the first name of every distinct property."""

    lits = list ( _literals ( frame ) )

    entries = list ( lits )

    for ( t1 , f1 ) , ( t2 , f2 ) in itertools.combinations ( lits , 2 ) :

        if f1.var == f2.var :

            continue

        entries.append ( ( '%s ∨ %s' % ( t1 , t2 ) , Or ( f1 , f2 ) ) )

        entries.append ( ( '%s ∧ %s' % ( t1 , t2 ) , And ( f1 , f2 ) ) )

    names , rows , seen = [ ] , [ ] , set ( )

    for text , f in entries :

        cuts = atom_extension ( frame , f ).cuts

        if cuts in seen :

            continue

        seen.add ( cuts )

        names.append ( text )

        rows.append ( cuts )

    return names , np.asarray ( rows , dtype = np.int64 ).reshape ( len ( rows ) , len ( frame.runs ) )


def render ( frame , cuts , dictionary = None ) :

    """Text of a cut vector: its dictionary name when it has one, else the
    run suffixes it contains."""

    cuts = tuple ( int ( c ) for c in cuts )

    names , rows = dictionary if dictionary is not None else witness_dictionary ( frame )

    for name , row in zip ( names , rows ) :

        if tuple ( row ) == cuts :

            return name

    parts = [ ]

    for r , ( c , n ) in enumerate ( zip ( cuts , frame.sizes ) ) :

        if c >= n :

            continue

        parts.append ( 'run%d' % r if c == 0 else 'run%d@>=%d' % ( r , c ) )

    return ' ∨ '.join ( parts ) if parts else '⊥'


# -------------------------------------------------------------- query syntax

FORMULA_GRAMMAR = r"""
?formula: disj
        | disj "=>" formula                 -> implies

?disj: conj
     | disj "or" conj                      -> or_

?conj: unary
     | conj "and" unary                    -> and_

?unary: "not" unary                         -> not_
      | "box" "(" REL ")" unary            -> box
      | "dia" "(" REL ")" unary            -> dia
      | "always" unary                      -> always_
      | "eventually" unary                  -> eventually_
      | atom

?atom: NAME "@" INT "=" INT                 -> value_atom
     | "halted"                             -> halted
     | "true"                               -> top
     | "false"                              -> bottom_
     | "phi"                                -> phi
     | "set" "(" [cut ("," cut)*] ")"       -> set_atom
     | "(" formula ")"

cut: INT                                    -> cut_int
   | "none"                                 -> cut_none

REL: /(T|KC|KP|WC|WP|K#)(:[A-Za-z0-9_]+)?/

%import common.CNAME -> NAME
%import common.INT
%import common.WS
%ignore WS
"""

NONE = 'none'


class FormulaBuilder ( Transformer ) :

    def implies ( self , items ) :

        return Implies ( * items )

    def or_ ( self , items ) :

        return Or ( * items )

    def and_ ( self , items ) :

        return And ( * items )

    def not_ ( self , items ) :

        return Not ( items [ 0 ] )

    def _modal ( self , cls , items ) :

        rel , body = items

        name , _ , agent = str ( rel ).partition ( ':' )

        if name == 'T' :

            return cls ( 'T' , None , body )

        return cls ( name , agent or 'A' , body )

    def box ( self , items ) :

        return self._modal ( Box , items )

    def dia ( self , items ) :

        return self._modal ( Dia , items )

    def always_ ( self , items ) :

        return always ( items [ 0 ] )

    def eventually_ ( self , items ) :

        return eventually ( items [ 0 ] )

    def value_atom ( self , items ) :

        name , depth , value = items

        return ValueAtom ( str ( name ) , int ( depth ) , int ( value ) )

    def halted ( self , items ) :

        return Halted ( )

    def top ( self , items ) :

        return Top ( )

    def bottom_ ( self , items ) :

        return bottom ( )

    def phi ( self , items ) :

        return Phi ( )

    def set_atom ( self , items ) :

        return ( 'cuts' , tuple ( i for i in items if i is not None ) )

    def cut_int ( self , items ) :

        return int ( items [ 0 ] )

    def cut_none ( self , items ) :

        return NONE


_formula_parser = Lark ( FORMULA_GRAMMAR , start = 'formula' , parser = 'lalr' , maybe_placeholders = True )


def _resolve_sets ( f , frame ) :

    if isinstance ( f , tuple ) and f and f [ 0 ] == 'cuts' :

        raw = f [ 1 ]

        if len ( raw ) != len ( frame.runs ) :

            raise ValueError ( 'set() needs one cut per run (%d runs)' % len ( frame.runs ) )

        return SetAtom ( TSProperty ( tuple ( int ( n ) if c == NONE else c for c , n in zip ( raw , frame.sizes ) ) ) )

    if hasattr ( f , '__dataclass_fields__' ) :

        fields = { k : _resolve_sets ( getattr ( f , k ) , frame ) for k in f.__dataclass_fields__ }

        return type ( f ) ( ** fields )

    return f


def parse_formula ( text , frame = None ) :

    """Parses the textual query syntax, e.g.
    ``dia(WC:A) eventually box(KC:A) s@0=0``. ``set(c0, c1, none, ...)``
    atoms need the frame to know the run sizes.
    """

    try :

        tree = _formula_parser.parse ( text )

    except UnexpectedInput as err :

        raise ValueError ( 'cannot parse formula at column %s' % getattr ( err , 'column' , '?' ) ) from err

    f = FormulaBuilder ( ).transform ( tree )

    return f if frame is None else _resolve_sets ( f , frame )
