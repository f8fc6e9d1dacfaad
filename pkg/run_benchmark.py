import time
import traceback

import modal_security_frames.named_programs as named
from modal_security_frames.frame_utils import read_config

config = 'config.txt' # your settings file here

mode = 'exhaustive' # or 'runset:2' for a faster, incomplete search

settings = read_config ( config )

start_time = time.time ( )

try :

    table = named.benchmark_table ( mode = mode , batch = settings.witness_batch , bound = settings.exhaustive_bound )

    print ( '# ' + named.BENCHMARK_HEADER )

    print ( table.to_string ( index = False ) )

    for row in table.itertuples ( index = False ) :

        expected = [ '--' if e is None else e for e in named.BENCHMARK_EXPECTED [ row.row ] ]

        got = [ getattr ( row , c ) for c in named.BENCHMARK_COLUMNS ]

        if got != expected :

            print ( 'row %s differs: expected %s' % ( row.row , expected ) )

except Exception :

    traceback.print_exc ( )

print ( "--- %s Seconds for the benchmark table ---" % ( time.time ( ) - start_time ) )
