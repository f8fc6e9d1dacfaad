#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Command line entry point.

Exit status: 0 when every property holds or every pairing agrees, 1 when a
violation or disagreement is found, 2 on usage errors or when a program
cannot be analysed.
"""

import argparse
import json
import logging
import sys

import pandas as pd

from . import mlogic, named_programs, oracle, secprops
from .errors import ModalSecurityError
from .frame import (build_frame, check_frame_properties, context_from_dict,
                    export_dot, export_json, load_policy)
from .frame_utils import read_config
from .lang import parse_program

logger = logging.getLogger ( __name__ )

TEXT , JSON = 'text' , 'json'


def emit_report ( results , fmt = TEXT , header = None ) :

    """Renders results as a text table or as JSON.

    Parameters
    ----------
    results : pandas.DataFrame or list of dict
    fmt : str
        ``text`` or ``json``
    header : str or None
        note printed above a text table, stored under ``header`` in JSON
    """

    if isinstance ( results , pd.DataFrame ) :

        records = json.loads ( results.to_json ( orient = 'records' , force_ascii = False ) )

        frame = results

    else :

        records = list ( results )

        frame = pd.DataFrame ( records )

    if fmt == JSON :

        doc = { 'results' : records }

        if header :

            doc [ 'header' ] = header

        return json.dumps ( doc , indent = 2 , sort_keys = True , ensure_ascii = False ) + '\n'

    lines = [ ]

    if header :

        lines.append ( '# ' + header )

    if len ( frame ) :

        lines.append ( frame.to_string ( index = False ) )

    return '\n'.join ( lines ) + ( '\n' if lines else '' )


def _load ( args ) :

    ctx , domains = load_policy ( args.policy )

    with open ( args.program ) as f :

        program = parse_program ( f.read ( ) , domains )

    return program , ctx


def _exit_code ( statuses , bad = ( secprops.VIOLATED , oracle.DISAGREE ) ) :

    statuses = list ( statuses )

    if secprops.UNSUPPORTED in statuses :

        return 2

    return 1 if any ( s in bad for s in statuses ) else 0


def cmd_check ( args , settings ) :

    program , ctx = _load ( args )

    verdicts = secprops.check_program ( program , ctx , args.prop or secprops.PROPERTY_IDS , mode = args.mode ,
                                        budget = settings.step_budget , bound = settings.store_bound ,
                                        exhaustive_bound = settings.exhaustive_bound , batch = settings.witness_batch ,
                                        max_witnesses = args.witnesses )

    if args.format == JSON :

        out = [ v.to_dict ( ) for v in verdicts ]

    else :

        out = [ { 'property' : v.property , 'status' : v.status , 'witnesses' : len ( v.witnesses ) ,
                  'phi' : v.witnesses [ 0 ].rendered if v.witnesses else '' ,
                  'world' : '%d@%s' % ( v.witnesses [ 0 ].run , v.witnesses [ 0 ].depth ) if v.witnesses else '' }
                for v in verdicts ]

    return out , _exit_code ( v.status for v in verdicts ) , None


def cmd_oracle ( args , settings ) :

    program , ctx = _load ( args )

    verdicts = [ oracle.trace_check ( program , ctx , t , settings.step_budget , settings.store_bound )
                 for t in ( args.prop or oracle.TRACE_IDS ) ]

    out = [ v.to_dict ( ) if args.format == JSON else { 'property' : v.property , 'status' : v.status ,
                                                         'witnesses' : len ( v.witnesses ) } for v in verdicts ]

    return out , _exit_code ( v.status for v in verdicts ) , None


def cmd_diff ( args , settings ) :

    program , ctx = _load ( args )

    report = oracle.differential ( program , ctx , mode = args.mode ,
                                   budget = settings.step_budget , bound = settings.store_bound ,
                                   exhaustive_bound = settings.exhaustive_bound )

    return report , _exit_code ( report [ 'agreement' ] ) , None


def cmd_benchmark ( args , settings ) :

    table = named_programs.benchmark_table ( mode = args.mode , batch = settings.witness_batch ,
                                           bound = settings.exhaustive_bound )

    expected = [ [ '--' if c is None else c for c in named_programs.BENCHMARK_EXPECTED [ row ] ]
                 for row in table [ 'row' ] ]

    got = table [ list ( named_programs.BENCHMARK_COLUMNS ) ].values.tolist ( )

    if got != expected :

        logger.warning ( 'benchmark table differs from the expected verdicts' )

    return table , 0 if got == expected else 1 , named_programs.BENCHMARK_HEADER


def cmd_frame ( args , settings ) :

    program , ctx = _load ( args )

    frame = build_frame ( program , ctx , settings.step_budget , settings.store_bound )

    if args.dot :

        return export_dot ( frame , args.agent , args.relation ) , 0 , None

    if args.format == JSON :

        return json.dumps ( export_json ( frame ) , indent = 2 , sort_keys = True , ensure_ascii = False ) + '\n' , 0 , None

    report = check_frame_properties ( frame )

    return report , 0 if report [ 'holds' ].all ( ) else 1 , None


def _manifest ( path ) :

    """(name, program, ctx) triples of a JSON manifest; entries hold a
    ``name``, the program inline (``program``) or on disk (``path``), and the
    policy inline (``policy``) or on disk (``policy_path``)."""

    with open ( path ) as f :

        entries = json.load ( f )

    corpus = [ ]

    for i , e in enumerate ( entries ) :

        if 'seed' in e :

            program , ctx = oracle.gen_program ( e [ 'seed' ] )

            corpus.append ( ( e.get ( 'name' , 'seed-%d' % e [ 'seed' ] ) , program , ctx ) )

            continue

        ctx , domains = load_policy ( e [ 'policy_path' ] ) if 'policy_path' in e else context_from_dict ( e [ 'policy' ] )

        if 'path' in e :

            with open ( e [ 'path' ] ) as f :

                text = f.read ( )

        else :

            text = e [ 'program' ]

        corpus.append ( ( e.get ( 'name' , 'entry-%d' % i ) , parse_program ( text , domains ) , ctx ) )

    return corpus


def cmd_audit ( args , settings ) :

    if args.manifest :

        corpus = _manifest ( args.manifest )

        separations = ( )

    else :

        corpus = [ ( c.name , ) + named_programs.load ( c ) for c in named_programs.corpus ( ) ]

        separations = named_programs.SEPARATIONS

    report = oracle.implication_audit ( corpus , separations , mode = args.mode ,
                                        budget = settings.step_budget , bound = settings.store_bound )

    return report , 0 if report [ 'holds' ].all ( ) else 1 , None


def cmd_fuzz ( args , settings ) :

    seeds = range ( args.seed , args.seed + ( args.count or settings.fuzz_seeds ) )

    frames = [ ]

    for seed in seeds :

        program , ctx = oracle.gen_program ( seed , settings.fuzz_variables , settings.fuzz_statements )

        report = oracle.differential ( program , ctx , mode = args.mode ,
                                       budget = settings.step_budget , bound = settings.store_bound ,
                                       exhaustive_bound = settings.exhaustive_bound )

        report.insert ( 0 , 'seed' , seed )

        report.insert ( 1 , 'program' , program.text )

        frames.append ( report )

    report = pd.concat ( frames , ignore_index = True ) if frames else pd.DataFrame ( )

    if args.disagreements and len ( report ) :

        report = report [ report [ 'agreement' ] == oracle.DISAGREE ]

    code = 1 if len ( report ) and ( report [ 'agreement' ] == oracle.DISAGREE ).any ( ) else 0

    return report , code , None


def cmd_query ( args , settings ) :

    program , ctx = _load ( args )

    frame = build_frame ( program , ctx , settings.step_budget , settings.store_bound )

    truth = mlogic.evaluate ( frame , mlogic.parse_formula ( args.formula , frame ) )

    rows = [ { 'world' : frame.describe_world ( i ) , 'holds' : bool ( t ) } for i , t in enumerate ( truth ) ]

    return rows , 0 if truth.all ( ) else 1 , None


def build_parser ( ) :

    parser = argparse.ArgumentParser ( prog = 'modal-security-frames' ,
                                       description = 'Modal security properties of while-programs' )

    parser.add_argument ( '--config' , help = 'settings file (key, value per line)' )

    parser.add_argument ( '--budget' , type = int , help = 'step budget per run (default from settings or MSF_BUDGET)' )

    parser.add_argument ( '--mode' , default = None , help = 'property search: exhaustive or runset:K (default runset:2)' )

    parser.add_argument ( '--format' , choices = ( TEXT , JSON ) , default = TEXT )

    parser.add_argument ( '-v' , '--verbose' , action = 'count' , default = 0 )

    sub = parser.add_subparsers ( dest = 'command' , required = True )

    def with_inputs ( s ) :

        s.add_argument ( 'program' , help = 'program file' )

        s.add_argument ( 'policy' , help = 'policy file (JSON)' )

        return s

    s = with_inputs ( sub.add_parser ( 'check' , help = 'check modal security properties' ) )
    s.add_argument ( '--prop' , action = 'append' , choices = secprops.PROPERTY_IDS )
    s.add_argument ( '--witnesses' , type = int , default = 32 , help = 'witnesses kept per property' )
    s.set_defaults ( main = cmd_check )

    s = with_inputs ( sub.add_parser ( 'oracle' , help = 'check trace-based definitions' ) )
    s.add_argument ( '--prop' , action = 'append' , choices = oracle.TRACE_IDS )
    s.set_defaults ( main = cmd_oracle )

    s = with_inputs ( sub.add_parser ( 'diff' , help = 'compare trace-based and modal verdicts' ) )
    s.set_defaults ( main = cmd_diff )

    s = sub.add_parser ( 'benchmark' , aliases = [ 'figure1' ] , help = 'robust declassification benchmark table' )
    s.set_defaults ( main = cmd_benchmark )

    s = with_inputs ( sub.add_parser ( 'frame' , help = 'export a frame or check its structural properties' ) )
    s.add_argument ( '--dot' , action = 'store_true' , help = 'emit graphviz text' )
    s.add_argument ( '--agent' , default = None )
    s.add_argument ( '--relation' , default = 'KC' , choices = ( 'KC' , 'KP' , 'WC' , 'WP' ) )
    s.set_defaults ( main = cmd_frame )

    s = sub.add_parser ( 'audit' , help = 'check the implications between properties over a corpus' )
    s.add_argument ( '--manifest' , help = 'corpus manifest (JSON); the named examples by default' )
    s.set_defaults ( main = cmd_audit )

    s = sub.add_parser ( 'fuzz' , help = 'differential test on generated programs' )
    s.add_argument ( '--seed' , type = int , default = 0 )
    s.add_argument ( '--count' , type = int , default = None )
    s.add_argument ( '--disagreements' , action = 'store_true' , help = 'only report disagreeing pairings' )
    s.set_defaults ( main = cmd_fuzz )

    s = with_inputs ( sub.add_parser ( 'query' , help = 'evaluate a formula at every world' ) )
    s.add_argument ( 'formula' , help = "e.g. 'dia(WC:A) eventually box(KC:A) s@0=0'" )
    s.set_defaults ( main = cmd_query )

    return parser


def run ( argv = None , out = None ) :

    """Runs one subcommand and writes its report. Returns the exit status."""

    out = sys.stdout if out is None else out

    parser = build_parser ( )

    try :

        args = parser.parse_args ( argv )

    except SystemExit as err :

        return 0 if err.code == 0 else 2

    logging.basicConfig ( level = logging.WARNING - 10 * min ( args.verbose , 2 ) ,
                          format = '%(levelname)s %(name)s: %(message)s' )

    settings = read_config ( args.config )

    if args.budget is not None :

        settings = settings._replace ( step_budget = args.budget )

    try :

        args.mode = mlogic.parse_mode ( args.mode , settings.runset_k )

        result , code , header = args.main ( args , settings )

    except ( ModalSecurityError , OSError , ValueError , KeyError ) as err :

        print ( 'error: %s' % err , file = sys.stderr )

        return 2

    out.write ( result if isinstance ( result , str ) else emit_report ( result , args.format , header ) )

    return code


def main ( ) :

    sys.exit ( run ( ) )


if __name__ == '__main__' :

    main ( )
