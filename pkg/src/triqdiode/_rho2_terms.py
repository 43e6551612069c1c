"""Unnormalised populations of the heat-conducting steady state.

Each line is ``coefficient factor factor ...`` where a factor such as ``L35+``
is the left-reservoir rate J_L(+w) on the dressed transition 3<->5, and
``R78-`` the right-reservoir rate J_R(-w) on 7<->8.  Transcribed as printed.
"""

RHO2_TERMS = {
    3: """
4 L35+ L46+ L57+ L68+ R34+
4 L35+ L46- L57+ L68+ R56+
4 L35+ L46- L57+ L68- R78+
2 L35+ L46+ L57+ R34+ R78+
2 L35+ L46- L57+ R56+ R78+
2 L35+ L46+ L68+ R34+ R78-
2 L35+ L46- L68+ R56+ R78-
2 L35+ L57+ L68+ R34+ R56+
2 L35+ L57+ L68- R34+ R78+
2 L46+ L57+ L68+ R34+ R56-
2 L46+ L57- L68+ R34+ R78-
1 L35+ L57+ R34+ R56+ R78+
1 L35+ L68+ R34+ R56+ R78-
1 L46+ L57+ R34+ R56- R78+
1 L46+ L68+ R34+ R56- R78-
""",
    4: """
4 L35+ L46+ L57+ L68+ R34-
4 L35- L46+ L57+ L68+ R56-
4 L35- L46+ L57- L68+ R78-
2 L35+ L46+ L57+ R34- R78+
2 L35- L46+ L57+ R56- R78+
2 L35+ L46+ L68+ R34- R78-
2 L35- L46+ L68+ R56- R78-
2 L35+ L57+ L68+ R34- R56+
2 L35+ L57+ L68- R34- R78+
2 L46+ L57+ L68+ R34- R56-
2 L46+ L57- L68+ R34- R78-
1 L35+ L57+ R34- R56+ R78+
1 L35+ L68+ R34- R56+ R78-
1 L46+ L57+ R34- R56- R78+
1 L46+ L68+ R34- R56- R78-
""",
    5: """
4 L35- L46+ L57+ L68+ R34+
4 L35- L46- L57+ L68+ R56+
4 L35- L46- L57+ L68- R78+
2 L35- L46+ L68+ R34+ R78-
2 L35- L46- L68+ R56+ R78-
2 L35- L46+ L57+ R34+ R78+
2 L35- L46- L57+ R56+ R78+
2 L35- L57+ L68+ R34+ R56+
2 L35- L57+ L68- R34+ R78+
2 L46- L57+ L68+ R34- R56+
2 L46- L57+ L68- R34- R78+
1 L35- L57+ R34+ R56+ R78+
1 L35- L68+ R34+ R56+ R78-
1 L46- L57+ R34- R56+ R78+
1 L46- L68+ R34- R56+ R78-
""",
    6: """
4 L35+ L46- L57+ L68+ R34-
4 L35- L46- L57+ L68+ R56-
4 L35- L46- L57- L68+ R78-
2 L35+ L46- L57+ R34- R78+
2 L35- L46- L57+ R56- R78+
2 L35+ L46- L68+ R34- R78-
2 L35- L46- L68+ R56- R78-
2 L35- L57+ L68+ R34+ R56-
2 L35- L57- L68+ R34+ R78-
2 L46- L57+ L68+ R34- R56-
2 L46- L57- L68+ R34- R78-
1 L35- L57+ R34+ R56- R78+
1 L35- L68+ R34+ R56- R78-
1 L46- L57+ R34- R56- R78+
1 L46- L68+ R34- R56- R78-
""",
    7: """
4 L35- L46+ L57- L68+ R34+
4 L35- L46- L57- L68+ R56+
4 L35- L46- L57- L68- R78+
2 L35- L46+ L57- R34+ R78+
2 L35- L46- L57- R56+ R78+
2 L35+ L46- L68- R34- R78+
2 L35- L46- L68- R56- R78+
2 L35- L57- L68+ R34+ R56+
2 L35- L57- L68- R34+ R78+
2 L46- L57- L68+ R34- R56+
2 L46- L57- L68- R34- R78+
1 L35- L57- R34+ R56+ R78+
1 L35- L68- R34+ R56- R78+
1 L46- L57- R34- R56+ R78+
1 L46- L68- R34- R56- R78+
""",
    8: """
4 L35+ L46- L57+ L68- R34-
4 L35- L46- L57+ L68- R56-
4 L35- L46- L57- L68- R78-
2 L35- L46+ L57- R34+ R78-
2 L35- L46- L57- R56+ R78-
2 L35+ L46- L68- R34- R78-
2 L35- L46- L68- R56- R78-
2 L35- L57+ L68- R34+ R56-
2 L35- L57- L68- R34+ R78-
2 L46- L57+ L68- R34- R56-
2 L46- L57- L68- R34- R78-
1 L35- L57- R34+ R56+ R78-
1 L35- L68- R34+ R56- R78-
1 L46- L57- R34- R56+ R78-
1 L46- L68- R34- R56- R78-
""",
}


def parse_terms(block: str) -> list:
    out = []
    for line in block.strip().splitlines():
        coef, *factors = line.split()
        out.append((int(coef), tuple(factors)))
    return out
