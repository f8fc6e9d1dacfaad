#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import io
import json

import pytest

from modal_security_frames import named_programs as named
from modal_security_frames.cli import emit_report, run

LEAK_POLICY = {
    'agents' : [ 'A' ] ,
    'read' : { 'A' : [ 'p' ] } ,
    'write' : { 'A' : [ ] } ,
    'domains' : { 'p' : [ 0 ] , 's' : { 'min' : 0 , 'max' : 1 } } ,
    'flags' : { 'signals_termination' : True } ,
}


@pytest.fixture
def leak ( tmp_path ) :

    program = tmp_path / 'leak.while'

    program.write_text ( 'p := s\n' )

    policy = tmp_path / 'leak.json'

    policy.write_text ( json.dumps ( LEAK_POLICY ) )

    return str ( program ) , str ( policy )


def invoke ( * argv ) :

    out = io.StringIO ( )

    code = run ( list ( argv ) , out = out )

    return code , out.getvalue ( )


def test_check_reports_violation ( leak ) :

    code , text = invoke ( 'check' , * leak , '--prop' , 'CONF' , '--prop' , 'INTEG' )

    assert code == 1

    assert 'VIOLATED' in text and 'SATISFIED' in text


def test_check_json ( leak ) :

    code , text = invoke ( '--format' , 'json' , 'check' , * leak , '--prop' , 'CONF' )

    results = json.loads ( text ) [ 'results' ]

    assert code == 1

    assert results [ 0 ] [ 'property' ] == 'CONF'

    assert results [ 0 ] [ 'witnesses' ] [ 0 ] [ 'phi_rendered' ] == 's@0=0'


def test_holding_property_exits_zero ( leak ) :

    code , _ = invoke ( 'check' , * leak , '--prop' , 'INTEG' )

    assert code == 0


def test_oracle_and_diff ( leak ) :

    code , text = invoke ( 'oracle' , * leak , '--prop' , 'TRACE_CONF' )

    assert code == 1 and 'TRACE_CONF' in text

    code , text = invoke ( 'diff' , * leak )

    assert code == 0 and 'DISAGREE' not in text


def test_frame_exports ( leak ) :

    code , text = invoke ( 'frame' , * leak , '--dot' )

    assert code == 0 and text.startswith ( 'digraph frame {' )

    code , text = invoke ( '--format' , 'json' , 'frame' , * leak )

    assert code == 0 and len ( json.loads ( text ) [ 'worlds' ] ) == 4


def test_query ( leak ) :

    code , text = invoke ( 'query' , * leak , 'eventually halted' )

    assert code == 0

    assert text.count ( 'True' ) == 4


def test_benchmark_command ( ) :

    code , text = invoke ( 'benchmark' )

    assert code == 0

    assert named.BENCHMARK_HEADER in text

    assert 'h@0=1 ∨ s@0=0' in text


def test_figure1_is_the_benchmark_command ( ) :

    code , text = invoke ( 'figure1' )

    assert code == 0

    assert text == invoke ( 'benchmark' ) [ 1 ]

    assert 'step' not in named.BENCHMARK_HEADER


def test_usage_errors ( leak , tmp_path ) :

    assert invoke ( 'check' ) [ 0 ] == 2

    assert invoke ( '--mode' , 'sometimes' , 'check' , * leak ) [ 0 ] == 2

    assert invoke ( 'check' , str ( tmp_path / 'missing.while' ) , leak [ 1 ] ) [ 0 ] == 2


def test_unrepresentable_program_exits_two ( tmp_path ) :

    program = tmp_path / 'flip.while'

    program.write_text ( 'while true do p := 1 - p' )

    policy = tmp_path / 'flip.json'

    policy.write_text ( json.dumps ( { 'read' : { 'A' : [ 'p' ] } , 'domains' : { 'p' : [ 0 , 1 ] } } ) )

    code , text = invoke ( 'check' , str ( program ) , str ( policy ) , '--prop' , 'CONF' )

    assert code == 2 and 'UNSUPPORTED' in text


def test_manifest_audit ( tmp_path , leak ) :

    manifest = tmp_path / 'corpus.json'

    manifest.write_text ( json.dumps ( [
        { 'name' : 'leak' , 'path' : leak [ 0 ] , 'policy' : LEAK_POLICY } ,
        { 'name' : 'inline' , 'program' : 'p := 0' , 'policy_path' : leak [ 1 ] } ,
    ] ) )

    code , text = invoke ( 'audit' , '--manifest' , str ( manifest ) )

    assert code == 0

    assert 'arrow' in text


def test_fuzz_runs_a_seed_range ( ) :

    code , text = invoke ( '--format' , 'json' , 'fuzz' , '--seed' , '5' , '--count' , '2' )

    results = json.loads ( text ) [ 'results' ]

    assert { r [ 'seed' ] for r in results } == { 5 , 6 }

    assert code == ( 1 if any ( r [ 'agreement' ] == 'DISAGREE' for r in results ) else 0 )


def test_emit_report_text_and_json ( ) :

    rows = [ { 'property' : 'CONF' , 'status' : 'SATISFIED' } ]

    assert emit_report ( rows , 'text' , header = 'note' ).startswith ( '# note\n' )

    assert json.loads ( emit_report ( rows , 'json' ) ) == { 'results' : rows }
