# This file makes the services directory a Python package: training, evaluation, sweep, coverage and report services
