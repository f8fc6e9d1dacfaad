#!/usr/bin/env python3
# -*- coding: utf-8 -*-


def pytest_configure ( config ) :

    config.addinivalue_line ( 'markers' , 'slow: runs the differential over the full generated corpus' )
