#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Utility functions called in by other modules: settings, sequence helpers and
graphviz quoting.
"""

import logging
import os
from collections import namedtuple

import numpy as np
import pandas as pd
import more_itertools as mit

logger = logging.getLogger ( __name__ )

Settings = namedtuple ( 'Settings' , [ 'step_budget' , 'store_bound' , 'exhaustive_bound' ,
                                      'runset_k' , 'witness_batch' , 'fuzz_variables' ,
                                      'fuzz_statements' , 'fuzz_seeds' ] )

DEFAULTS = Settings ( step_budget = 10000 , store_bound = 4096 , exhaustive_bound = 10000000 ,
                      runset_k = 2 , witness_batch = 4096 , fuzz_variables = 3 ,
                      fuzz_statements = 6 , fuzz_seeds = 200 )

BUDGET_ENV = 'MSF_BUDGET'


def read_config ( path = None ) :

    """Reads settings from a two column text file (first line is a title,
    then one ``key, value`` pair per line). Keys missing from the file keep
    their default value. The step budget may be overridden by the
    ``MSF_BUDGET`` environment variable.

    Parameters
    ----------

    path : str or None
        path to the settings file. None returns the defaults.

    Returns
    -------
    settings : Settings
    """

    values = DEFAULTS._asdict ( )

    if path is not None :

        config_df = pd.read_csv ( path , sep = ',' , skiprows = 1 , header = None , skipinitialspace = True )

        config_df = config_df.transpose ( )

        config_df.columns = [ str ( c ).strip ( ) for c in config_df.iloc [ 0 ] ]

        config_df = config_df.drop ( config_df.index [ 0 ] )

        for key in config_df.columns :

            if key not in values :

                logger.warning ( 'ignoring unknown setting %s in %s' , key , path )

                continue

            values [ key ] = int ( float ( config_df [ key ].values [ 0 ] ) )

    if os.environ.get ( BUDGET_ENV ) :

        values [ 'step_budget' ] = int ( os.environ [ BUDGET_ENV ] )

    return Settings ( **values )


def destutter ( seq ) :

    """Collapses maximal runs of equal consecutive elements.

    Parameters
    ----------
    seq : iterable

    Returns
    -------
    tuple
    """

    return tuple ( mit.unique_justseen ( seq ) )


def factorize ( keys ) :

    """Integer label per key, equal keys getting equal labels."""

    labels = { }

    return np.asarray ( [ labels.setdefault ( k , len ( labels ) ) for k in keys ] , dtype = np.int64 )


def equal_label_matrix ( labels ) :

    labels = np.asarray ( labels )

    return labels [ : , None ] == labels [ None , : ]


def gvquote ( text ) :

    return '"{}"'.format ( str ( text ).replace ( '\\' , '\\\\' ).replace ( '"' , '\\"' ) )


def format_value ( value ) :

    """Short text for a store value: ints, streams and endorsement sets."""

    if isinstance ( value , frozenset ) :

        return '{' + ','.join ( '(%s,%s)' % pair for pair in sorted ( value ) ) + '}'

    if isinstance ( value , tuple ) :

        return '[' + ','.join ( format_value ( v ) for v in value ) + ']'

    return str ( value )
