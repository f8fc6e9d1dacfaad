#!/usr/bin/env python3
# -*- coding: utf-8 -*-

from modal_security_frames.frame_utils import (BUDGET_ENV, DEFAULTS,
                                               destutter, equal_label_matrix,
                                               factorize, format_value,
                                               gvquote, read_config)


def test_defaults_without_a_file ( monkeypatch ) :

    monkeypatch.delenv ( BUDGET_ENV , raising = False )

    assert read_config ( ) == DEFAULTS


def test_settings_file_overrides_defaults ( tmp_path , monkeypatch ) :

    monkeypatch.delenv ( BUDGET_ENV , raising = False )

    path = tmp_path / 'config.txt'

    path.write_text ( 'settings of the security checker\nstep_budget, 50\nrunset_k,1\n' )

    settings = read_config ( str ( path ) )

    assert settings.step_budget == 50

    assert settings.runset_k == 1

    assert settings.store_bound == DEFAULTS.store_bound


def test_environment_overrides_the_budget ( monkeypatch ) :

    monkeypatch.setenv ( BUDGET_ENV , '77' )

    assert read_config ( ).step_budget == 77


def test_destutter ( ) :

    assert destutter ( [ 1 , 1 , 2 , 2 , 1 ] ) == ( 1 , 2 , 1 )

    assert destutter ( [ ] ) == ( )


def test_factorize_labels_by_first_appearance ( ) :

    labels = factorize ( [ ( 'b' , ) , ( 'a' , ) , ( 'b' , ) ] )

    assert list ( labels ) == [ 0 , 1 , 0 ]

    assert equal_label_matrix ( labels ) [ 0 , 2 ]


def test_text_helpers ( ) :

    assert gvquote ( 'say "hi"' ) == '"say \\"hi\\""'

    assert format_value ( frozenset ( [ ( 'A' , 't' ) ] ) ) == '{(A,t)}'

    assert format_value ( ( 1 , 0 ) ) == '[1,0]'
