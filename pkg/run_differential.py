import time
import traceback

import pandas as pd

import modal_security_frames.oracle as oracle
from modal_security_frames.frame_utils import read_config

config = 'config.txt' # your settings file here

save_path = 'differential_results.csv' # your output file here

first_seed = 0

settings = read_config ( config )

reports = [ ]

total_start_time = time.time ( )

for seed in range ( first_seed , first_seed + settings.fuzz_seeds ) :

    start_time = time.time ( )

    try :

        program , ctx = oracle.gen_program ( seed , settings.fuzz_variables , settings.fuzz_statements )

        report = oracle.differential ( program , ctx , mode = 'exhaustive' , budget = settings.step_budget ,
                                       bound = settings.store_bound , exhaustive_bound = settings.exhaustive_bound )

        report.insert ( 0 , 'seed' , seed )

        report.insert ( 1 , 'program' , program.text )

        reports.append ( report )

        if ( report [ 'agreement' ] == oracle.DISAGREE ).any ( ) :

            print ( 'disagreement for seed' , seed , ':' , program.text )

    except Exception :

        print ( 'passing seed' , seed )

        traceback.print_exc ( )

    print ( "--- %s Seconds for seed %d ---" % ( time.time ( ) - start_time , seed ) )

if reports :

    results = pd.concat ( reports , ignore_index = True )

    results.to_csv ( save_path , index = False )

    print ( results [ 'agreement' ].value_counts ( ) )

print ( "--- %s Total seconds for the seeds requested ---" % ( time.time ( ) - total_start_time ) )
