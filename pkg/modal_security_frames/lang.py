#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Parser and small-step semantics of the while-language.

Programs are parsed with a lark LALR grammar into frozen dataclasses, the
surface sugar (loop, for, output, input, endorse) is rewritten into the core
statements skip, assignment, sequence, if and while, and ``step`` executes one
assignment or skip of a configuration.

Values are integers, arithmetic wraps around the program modulus (the largest
declared domain value plus one) and tests yield 0 or 1. The reserved
variables ``O``, ``I`` and ``E`` hold the output stream, the input stream and
the set of endorsement events.
"""

import logging
import operator
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Tuple

from lark import Lark, Transformer
from lark.exceptions import UnexpectedInput, VisitError

from .errors import (ProgramSyntaxError, ReservedVariableError, StuckError,
                     UndeclaredVariableError)

logger = logging.getLogger ( __name__ )

OUTPUT , INPUT , EVENTS = 'O' , 'I' , 'E'

RESERVED = ( OUTPUT , INPUT , EVENTS )

RESERVED_DOMAINS = { OUTPUT : ( ( ) , ) , INPUT : ( ( ) , ) , EVENTS : ( frozenset ( ) , ) }


# ---------------------------------------------------------------- expressions

@dataclass ( frozen = True )
class Lit :
    value : int


@dataclass ( frozen = True )
class Var :
    name : str


@dataclass ( frozen = True )
class BinOp :
    op : str
    left : object
    right : object


@dataclass ( frozen = True )
class Not :
    operand : object


@dataclass ( frozen = True )
class Cons :
    """``head :: stream``"""
    head : object
    stream : object


@dataclass ( frozen = True )
class Head :
    stream : object


@dataclass ( frozen = True )
class Tail :
    stream : object


@dataclass ( frozen = True )
class Insert :
    """``events ∪ {(agent, var)}``"""
    events : object
    item : Tuple [ str , str ]


# ----------------------------------------------------------------- statements

@dataclass ( frozen = True )
class Skip :
    pass


@dataclass ( frozen = True )
class Assign :
    var : str
    expr : object


@dataclass ( frozen = True )
class Seq :
    first : object
    second : object


@dataclass ( frozen = True )
class If :
    cond : object
    then : object
    orelse : object = Skip ( )


@dataclass ( frozen = True )
class While :
    cond : object
    body : object


@dataclass ( frozen = True )
class Loop :
    pass


@dataclass ( frozen = True )
class For :
    var : str
    low : object
    high : object
    body : object


@dataclass ( frozen = True )
class Output :
    expr : object


@dataclass ( frozen = True )
class Input :
    var : str


@dataclass ( frozen = True )
class Endorse :
    agent : str
    var : str


@dataclass ( frozen = True )
class Halt :
    """Residual of a terminated configuration."""

    def __repr__ ( self ) :

        return 'HALT'


HALT = Halt ( )


@dataclass ( frozen = True )
class Config :
    residual : object
    store : Tuple

    @property
    def halted ( self ) :

        return self.residual == HALT


@dataclass ( frozen = True )
class Program :
    text : str
    ast : object
    vars : Tuple [ str , ... ]
    domains : Dict [ str , Tuple ] = field ( hash = False , compare = False )
    modulus : int = 2

    @cached_property
    def index ( self ) :

        return { v : i for i , v in enumerate ( self.vars ) }

    @property
    def user_vars ( self ) :

        return tuple ( v for v in self.vars if v not in RESERVED )


# -------------------------------------------------------------------- grammar

GRAMMAR = r"""
start: block

block: [stmt] (_SEP [stmt])*

?stmt: simple
     | "if" expr "then" stmt ["else" stmt]          -> if_stmt
     | "while" expr "do" stmt                       -> while_stmt
     | "for" NAME "=" expr ".." expr "do" stmt      -> for_stmt

?simple: NAME ":=" expr                             -> assign
       | "skip"                                     -> skip
       | "loop"                                     -> loop
       | "endorse" "(" NAME "," NAME ")"            -> endorse
       | "output" "(" expr ")"                      -> output
       | "input" "(" NAME ")"                       -> input
       | "var" NAME "in" domain                     -> decl
       | "(" block ")"
       | "{" block "}"

domain: "{" INT ("," INT)* "}"                      -> domain_set
      | INT ".." INT                                -> domain_range

?expr: or_expr

?or_expr: and_expr
        | or_expr "or" and_expr                     -> or_
        | or_expr "∨" and_expr                      -> or_
        | or_expr "||" and_expr                     -> or_

?and_expr: not_expr
         | and_expr "and" not_expr                  -> and_
         | and_expr "∧" not_expr                    -> and_
         | and_expr "&&" not_expr                   -> and_

?not_expr: cmp_expr
         | "not" not_expr                           -> not_
         | "¬" not_expr                             -> not_
         | "!" not_expr                             -> not_

?cmp_expr: sum_expr
         | sum_expr "=" sum_expr                    -> eq
         | sum_expr "==" sum_expr                   -> eq
         | sum_expr "≠" sum_expr                    -> ne
         | sum_expr "!=" sum_expr                   -> ne
         | sum_expr "<" sum_expr                    -> lt
         | sum_expr "<=" sum_expr                   -> le
         | sum_expr "≤" sum_expr                    -> le
         | sum_expr ">" sum_expr                    -> gt
         | sum_expr ">=" sum_expr                   -> ge
         | sum_expr "≥" sum_expr                    -> ge

?sum_expr: prod_expr
         | sum_expr "+" prod_expr                   -> add
         | sum_expr "-" prod_expr                   -> sub
         | sum_expr "⊕" prod_expr                   -> xor
         | sum_expr "xor" prod_expr                 -> xor

?prod_expr: atom
          | prod_expr "*" atom                      -> mul

?atom: INT                                          -> lit
     | "true"                                       -> true_
     | "false"                                      -> false_
     | NAME                                         -> var
     | "(" expr ")"

_SEP: /[;\n]+/
COMMENT: /#[^\n]*/

%import common.CNAME -> NAME
%import common.INT
%ignore /[ \t\f\r]+/
%ignore COMMENT
"""


@dataclass ( frozen = True )
class _Decl :
    name : str
    values : Tuple [ int , ... ]


def _binop ( op ) :

    def build ( self , items ) :

        left , right = items

        return BinOp ( op , left , right )

    return build


class ProgramBuilder ( Transformer ) :
    """Turns a parse tree into a surface statement and collects the
    ``var`` declarations met on the way."""

    def __init__ ( self ) :

        super ( ProgramBuilder , self ).__init__ ( )

        self.decls = [ ]

    def start ( self , items ) :

        ( body , ) = items

        return body

    def block ( self , items ) :

        stmts = [ ]

        for item in items :

            if item is None :

                continue

            if isinstance ( item , _Decl ) :

                self.decls.append ( item )

                continue

            stmts.append ( item )

        return sequence ( stmts )

    def if_stmt ( self , items ) :

        cond , then , orelse = items

        return If ( cond , then , Skip ( ) if orelse is None else orelse )

    def while_stmt ( self , items ) :

        cond , body = items

        return While ( cond , body )

    def for_stmt ( self , items ) :

        name , low , high , body = items

        return For ( str ( name ) , low , high , body )

    def assign ( self , items ) :

        name , expr = items

        return Assign ( str ( name ) , expr )

    def skip ( self , items ) :

        return Skip ( )

    def loop ( self , items ) :

        return Loop ( )

    def endorse ( self , items ) :

        agent , name = items

        return Endorse ( str ( agent ) , str ( name ) )

    def output ( self , items ) :

        ( expr , ) = items

        return Output ( expr )

    def input ( self , items ) :

        ( name , ) = items

        return Input ( str ( name ) )

    def decl ( self , items ) :

        name , values = items

        return _Decl ( str ( name ) , values )

    def domain_set ( self , items ) :

        return tuple ( sorted ( set ( int ( i ) for i in items ) ) )

    def domain_range ( self , items ) :

        low , high = ( int ( i ) for i in items )

        if high < low :

            raise ProgramSyntaxError ( 'empty domain %s..%s' % ( low , high ) )

        return tuple ( range ( low , high + 1 ) )

    def not_ ( self , items ) :

        ( operand , ) = items

        return Not ( operand )

    def lit ( self , items ) :

        return Lit ( int ( items [ 0 ] ) )

    def true_ ( self , items ) :

        return Lit ( 1 )

    def false_ ( self , items ) :

        return Lit ( 0 )

    def var ( self , items ) :

        return Var ( str ( items [ 0 ] ) )

    or_ = _binop ( 'or' )
    and_ = _binop ( 'and' )
    eq = _binop ( 'eq' )
    ne = _binop ( 'ne' )
    lt = _binop ( 'lt' )
    le = _binop ( 'le' )
    gt = _binop ( 'gt' )
    ge = _binop ( 'ge' )
    add = _binop ( 'add' )
    sub = _binop ( 'sub' )
    xor = _binop ( 'xor' )
    mul = _binop ( 'mul' )


_parser = Lark ( GRAMMAR , start = 'start' , parser = 'lalr' , maybe_placeholders = True )

_expr_parser = Lark ( GRAMMAR , start = 'expr' , parser = 'lalr' , maybe_placeholders = True )


def sequence ( stmts ) :

    """Right nested ``Seq`` of a list of statements, ``Skip`` when empty."""

    stmts = list ( stmts )

    if not stmts :

        return Skip ( )

    result = stmts [ -1 ]

    for s in reversed ( stmts [ : -1 ] ) :

        result = Seq ( s , result )

    return result


def _transform ( parser , text ) :

    builder = ProgramBuilder ( )

    try :

        tree = parser.parse ( text )

        return builder.transform ( tree ) , builder.decls

    except UnexpectedInput as err :

        raise ProgramSyntaxError ( 'unexpected input' , getattr ( err , 'line' , None ) ,
                                   getattr ( err , 'column' , None ) ) from err

    except VisitError as err :

        if isinstance ( err.orig_exc , ProgramSyntaxError ) :

            raise err.orig_exc from err

        raise


def parse_expr ( text ) :

    """Parses a single expression, e.g. a declassification condition."""

    expr , _ = _transform ( _expr_parser , text )

    return expr


# ------------------------------------------------------------------ desugaring

def desugar ( stmt ) :

    """Rewrites surface statements into skip, assignment, sequence, if and
    while. Applying it to an already desugared statement returns it
    unchanged.

    Parameters
    ----------
    stmt : statement

    Returns
    -------
    core statement
    """

    if isinstance ( stmt , ( Skip , Assign ) ) :

        return stmt

    if isinstance ( stmt , Seq ) :

        return Seq ( desugar ( stmt.first ) , desugar ( stmt.second ) )

    if isinstance ( stmt , If ) :

        return If ( stmt.cond , desugar ( stmt.then ) , desugar ( stmt.orelse ) )

    if isinstance ( stmt , While ) :

        return While ( stmt.cond , desugar ( stmt.body ) )

    if isinstance ( stmt , Loop ) :

        return While ( Lit ( 1 ) , Skip ( ) )

    if isinstance ( stmt , For ) :

        body = desugar ( stmt.body )

        i = Var ( stmt.var )

        step = Seq ( Assign ( stmt.var , BinOp ( 'add' , i , Lit ( 1 ) ) ) , body )

        return Seq ( Assign ( stmt.var , stmt.low ) ,
                     If ( BinOp ( 'le' , i , stmt.high ) ,
                          Seq ( body , While ( BinOp ( 'lt' , i , stmt.high ) , step ) ) ,
                          Skip ( ) ) )

    if isinstance ( stmt , Output ) :

        return Assign ( OUTPUT , Cons ( stmt.expr , Var ( OUTPUT ) ) )

    if isinstance ( stmt , Input ) :

        return Seq ( Assign ( stmt.var , Head ( Var ( INPUT ) ) ) ,
                     Assign ( INPUT , Tail ( Var ( INPUT ) ) ) )

    if isinstance ( stmt , Endorse ) :

        return Assign ( EVENTS , Insert ( Var ( EVENTS ) , ( stmt.agent , stmt.var ) ) )

    raise TypeError ( 'not a statement: %r' % ( stmt , ) )


def _surface_targets ( stmt ) :

    """Variables written by user statements before desugaring."""

    if isinstance ( stmt , Assign ) :

        yield stmt.var

    elif isinstance ( stmt , Seq ) :

        yield from _surface_targets ( stmt.first )

        yield from _surface_targets ( stmt.second )

    elif isinstance ( stmt , If ) :

        yield from _surface_targets ( stmt.then )

        yield from _surface_targets ( stmt.orelse )

    elif isinstance ( stmt , ( While , For ) ) :

        if isinstance ( stmt , For ) :

            yield stmt.var

        yield from _surface_targets ( stmt.body )

    elif isinstance ( stmt , Input ) :

        yield stmt.var


def variables ( node ) :

    """Every variable name read or written in a statement or expression."""

    found = [ ]

    def walk ( n ) :

        if isinstance ( n , Var ) :

            found.append ( n.name )

        elif isinstance ( n , ( Assign , For ) ) :

            found.append ( n.var )

        elif isinstance ( n , Input ) :

            found.append ( n.var )

            found.append ( INPUT )

        elif isinstance ( n , Endorse ) :

            found.append ( n.var )

            found.append ( EVENTS )

        elif isinstance ( n , Output ) :

            found.append ( OUTPUT )

        if hasattr ( n , '__dataclass_fields__' ) :

            for name in n.__dataclass_fields__ :

                walk ( getattr ( n , name ) )

    walk ( node )

    return list ( dict.fromkeys ( found ) )


def parse_program ( text , domains = None ) :

    """Parses and desugars a program.

    Declarations inside the program (``var x in {0,1}``) take precedence over
    ``domains``. Variables are ordered by declaration, then by ``domains``,
    with the reserved stream and event variables last.

    Parameters
    ----------
    text : str
        program text
    domains : dict or None
        variable name to iterable of initial values

    Returns
    -------
    program : Program

    Raises
    ------
    ProgramSyntaxError, UndeclaredVariableError, ReservedVariableError
    """

    surface , decls = _transform ( _parser , text )

    for d in decls :

        if d.name in RESERVED :

            raise ReservedVariableError ( '%s is reserved' % d.name )

    for target in _surface_targets ( surface ) :

        if target in RESERVED :

            raise ReservedVariableError ( 'cannot assign reserved variable %s' % target )

    merged = { }

    for d in decls :

        merged [ d.name ] = d.values

    for name , values in ( domains or { } ).items ( ) :

        if name in merged :

            continue

        if name in ( OUTPUT , EVENTS ) :

            raise ReservedVariableError ( '%s is reserved' % name )

        merged [ name ] = tuple ( tuple ( v ) if isinstance ( v , list ) else v for v in values )

    used = variables ( surface )

    for name in used :

        if name in RESERVED :

            merged.setdefault ( name , RESERVED_DOMAINS [ name ] )

        elif name not in merged :

            raise UndeclaredVariableError ( 'variable %s has no domain' % name )

    for name , values in merged.items ( ) :

        if len ( values ) == 0 :

            raise UndeclaredVariableError ( 'variable %s has an empty domain' % name )

    names = [ n for n in merged if n not in RESERVED ] + [ n for n in RESERVED if n in merged ]

    ints = [ v for n in names for v in merged [ n ] if isinstance ( v , int ) ]

    modulus = max ( 2 , max ( ints ) + 1 if ints else 0 )

    program = Program ( text = text , ast = desugar ( surface ) , vars = tuple ( names ) ,
                        domains = { n : tuple ( merged [ n ] ) for n in names } , modulus = modulus )

    logger.debug ( 'parsed program over %s, modulus %d' , program.vars , modulus )

    return program


# ------------------------------------------------------------------ semantics

_ARITH = { 'add' : operator.add , 'sub' : operator.sub , 'mul' : operator.mul , 'xor' : operator.xor }

_TESTS = { 'eq' : operator.eq , 'ne' : operator.ne , 'lt' : operator.lt ,
           'le' : operator.le , 'gt' : operator.gt , 'ge' : operator.ge }


def evaluate ( expr , store , program ) :

    """Value of an expression in a store.

    Raises
    ------
    StuckError
        on ``head`` or ``tail`` of an empty stream
    """

    if isinstance ( expr , Lit ) :

        return expr.value

    if isinstance ( expr , Var ) :

        return store [ program.index [ expr.name ] ]

    if isinstance ( expr , BinOp ) :

        if expr.op == 'and' :

            return int ( bool ( evaluate ( expr.left , store , program ) )
                         and bool ( evaluate ( expr.right , store , program ) ) )

        if expr.op == 'or' :

            return int ( bool ( evaluate ( expr.left , store , program ) )
                         or bool ( evaluate ( expr.right , store , program ) ) )

        left = evaluate ( expr.left , store , program )

        right = evaluate ( expr.right , store , program )

        if expr.op in _TESTS :

            return int ( _TESTS [ expr.op ] ( left , right ) )

        return _ARITH [ expr.op ] ( left , right ) % program.modulus

    if isinstance ( expr , Not ) :

        return int ( not evaluate ( expr.operand , store , program ) )

    if isinstance ( expr , Cons ) :

        return ( evaluate ( expr.head , store , program ) , ) + evaluate ( expr.stream , store , program )

    if isinstance ( expr , ( Head , Tail ) ) :

        stream = evaluate ( expr.stream , store , program )

        if len ( stream ) == 0 :

            raise StuckError ( 'empty input stream' )

        return stream [ 0 ] if isinstance ( expr , Head ) else stream [ 1 : ]

    if isinstance ( expr , Insert ) :

        return evaluate ( expr.events , store , program ) | frozenset ( [ expr.item ] )

    raise TypeError ( 'not an expression: %r' % ( expr , ) )


def _split ( stmt , store , program ) :

    """Splits a statement into the skip or assignment executed next and the
    statement left afterwards (None when nothing is left). Sequences, tests and
    loop unrollings take no step of their own. A loop whose body has nothing
    to execute spins in place. Returns ``(None, None)`` when the statement
    executes nothing.
    """

    if isinstance ( stmt , ( Skip , Assign ) ) :

        return stmt , None

    if isinstance ( stmt , Seq ) :

        head , rest = _split ( stmt.first , store , program )

        if head is None :

            return _split ( stmt.second , store , program )

        return head , stmt.second if rest is None else Seq ( rest , stmt.second )

    if isinstance ( stmt , If ) :

        branch = stmt.then if evaluate ( stmt.cond , store , program ) else stmt.orelse

        return _split ( branch , store , program )

    if isinstance ( stmt , While ) :

        if not evaluate ( stmt.cond , store , program ) :

            return None , None

        head , rest = _split ( stmt.body , store , program )

        if head is None :

            return Skip ( ) , stmt

        return head , stmt if rest is None else Seq ( rest , stmt )

    raise TypeError ( 'not a core statement: %r' % ( stmt , ) )


def initial_config ( program , store ) :

    return Config ( program.ast , tuple ( store ) )


def step ( program , config ) :

    """Executes one skip or assignment of a configuration.

    Residuals with nothing left to execute are normalised to ``HALT`` at once,
    so ``if u=1 then p:=s`` takes exactly one step from every store.

    Parameters
    ----------
    program : Program
    config : Config
        a configuration whose residual is not ``HALT``

    Returns
    -------
    config : Config

    Raises
    ------
    StuckError
        when the executed assignment reads an empty stream
    """

    if config.halted :

        raise ValueError ( 'halted configuration has no successor' )

    store = config.store

    head , rest = _split ( config.residual , store , program )

    if head is None :

        return Config ( HALT , store )

    if isinstance ( head , Assign ) :

        value = evaluate ( head.expr , store , program )

        i = program.index [ head.var ]

        store = store [ : i ] + ( value , ) + store [ i + 1 : ]

    if rest is None or _split ( rest , store , program ) [ 0 ] is None :

        return Config ( HALT , store )

    return Config ( rest , store )
