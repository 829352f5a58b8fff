"""superfractal: exact engines for a family of fractal superalgebras.

Layers, from the ground up:

* operators  - normal-ordered Grassmann differential operators (the oracle)
* lieq       - the Lie superalgebra Q = Lie(v0, v1, v2) in its monomial basis
* weights    - weights, multidegrees, Hilbert series, paraboloid bounds
* poisson    - the Poisson superalgebra P = Poisson(V0, V1, V2)
* assoc      - the associative hull A and its quantization
* jordan     - the Jordan superalgebras J = Kan(P) and K = Jor(Q)
* cli        - command-line front end (basis, hilbert, product, points,
               decompose, verify)
"""

__version__ = "0.1.0"
