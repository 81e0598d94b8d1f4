"""
Output generators: result tables, JSON documents and gnuplot data.
"""
