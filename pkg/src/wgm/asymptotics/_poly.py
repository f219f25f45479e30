# Dense polynomial and truncated-series helpers over any numeric field
# (float or Fraction).  A polynomial is a list of coefficients, low degree first.


def trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p or [0]


def degree(p):
    p = trim(p)
    return -1 if (len(p) == 1 and p[0] == 0) else len(p) - 1


def add(p, q):
    n = max(len(p), len(q))
    zero = 0 * (p[0] if p else q[0])
    return [(p[i] if i < len(p) else zero) + (q[i] if i < len(q) else zero) for i in range(n)]


def scale(p, c):
    return [c * a for a in p]


def sub(p, q):
    return add(p, scale(q, -1))


def mul(p, q):
    out = [0 * p[0] * q[0]] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for k, b in enumerate(q):
            out[i + k] = out[i + k] + a * b
    return out


def deriv(p):
    if len(p) <= 1:
        return [0 * p[0]]
    return [i * p[i] for i in range(1, len(p))]


def integ(p):
    """Antiderivative vanishing at 0."""
    return [0 * p[0]] + [p[i] / (i + 1) for i in range(len(p))]


def evaluate(p, x):
    acc = 0 * p[-1]
    for c in reversed(p):
        acc = acc * x + c
    return acc


def compose_affine(p, a, b):
    """p(a + b x) as a polynomial in x."""
    out = [0 * p[0]]
    power = [1 + 0 * a]
    lin = [a, b]
    for c in p:
        out = add(out, scale(power, c))
        power = mul(power, lin)
    return out


def monomial(c, k):
    return [0 * c] * k + [c]


# truncated series (fixed length n)


def ser_mul(s, t, n):
    out = []
    for q in range(n):
        acc = 0 * s[0]
        for i in range(q + 1):
            if i < len(s) and q - i < len(t):
                acc = acc + s[i] * t[q - i]
        out.append(acc)
    return out


def ser_inv(s, n):
    out = [1 / s[0]]
    for q in range(1, n):
        acc = 0 * s[0]
        for i in range(1, q + 1):
            if i < len(s):
                acc = acc + s[i] * out[q - i]
        out.append(-acc / s[0])
    return out


def ser_deriv(s, n):
    d = [i * s[i] for i in range(1, len(s))]
    return (d + [0 * s[0]] * n)[:n]
