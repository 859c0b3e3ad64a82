"""
LPStream: LP-type problems over streams and distributed partitions.

Subpackages:
    sketch        l0 estimators and samplers (exact and randomized backends)
    net           metric nets that snap the input to a finite universe
    core          the sampling/reweighting solver loop
    problems      MEB, SVM, bounded LP, classification, bounded SDP plugins
    streams       multipass and strict turnstile runners
    distributed   coordinator and parallel models with load metering
    cli           command-line front end and report schema
"""

__version__ = "0.1.0"
