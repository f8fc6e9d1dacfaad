# -*- coding: utf-8 -*-
#!/usr/bin/env python

"""Exceptions raised while parsing programs, unfolding runs, building frames
and quantifying over temporally sound properties.

Property checks do not let these escape: a program whose runs cannot be
represented is reported with an UNSUPPORTED verdict instead.
"""


class ModalSecurityError ( Exception ) :
    """Base class for every error raised by this package."""


class ProgramSyntaxError ( ModalSecurityError ) :

    def __init__ ( self , message , line = None , column = None ) :

        self.line = line

        self.column = column

        if line is not None :

            message = '%s (line %s, column %s)' % ( message , line , column )

        super ( ProgramSyntaxError , self ).__init__ ( message )


class UndeclaredVariableError ( ModalSecurityError ) :
    pass


class ReservedVariableError ( ModalSecurityError ) :
    pass


class StuckError ( ModalSecurityError ) :
    """Expression evaluation has no value, e.g. reading an empty input stream."""


class StoreBoundError ( ModalSecurityError ) :
    pass


class BudgetExceededError ( ModalSecurityError ) :
    pass


class UnsupportedDivergenceError ( ModalSecurityError ) :

    def __init__ ( self , message , run = None ) :

        self.run = run

        super ( UnsupportedDivergenceError , self ).__init__ ( message )


class UnsupportedAtomError ( ModalSecurityError ) :
    pass


class NotTemporallySoundError ( ModalSecurityError ) :
    pass


class ExhaustiveBoundError ( ModalSecurityError ) :
    pass


class PolicyError ( ModalSecurityError ) :
    pass
