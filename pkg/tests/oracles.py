"""Independent reference implementations used only by the tests.

Written without reference to the production code paths: plain loops,
different algorithms (Jacobi SVD, winding numbers) and no shared helpers.
"""

from __future__ import annotations

import math
from collections import defaultdict


def _jacobi_columns(cols, sweeps, tol):
    """Orthogonalize columns in place by plane rotations; returns the accumulated rotation."""
    n = len(cols)
    v = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    for _ in range(sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = sum(x * x for x in cols[p])
                beta = sum(x * x for x in cols[q])
                gamma = sum(x * y for x, y in zip(cols[p], cols[q]))
                scale = math.sqrt(alpha * beta)
                if scale == 0.0 or abs(gamma) <= tol * scale:
                    continue
                off = max(off, abs(gamma) / scale)
                zeta = (beta - alpha) / (2.0 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                cp, cq = cols[p], cols[q]
                cols[p] = [c * x - s * y for x, y in zip(cp, cq)]
                cols[q] = [s * x + c * y for x, y in zip(cp, cq)]
                for row in v:
                    vp, vq = row[p], row[q]
                    row[p], row[q] = c * vp - s * vq, s * vp + c * vq
        if off <= tol:
            break
    return v


def jacobi_svd(a, sweeps: int = 100, tol: float = 1e-15):
    """One-sided Jacobi SVD of a list-of-lists matrix, pure Python floats.

    Returns (the min(m, n) singular values descending, left singular vectors as
    columns). Wide matrices are handled through the transpose.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    if m >= n:
        cols = [[float(a[i][j]) for i in range(m)] for j in range(n)]
        _jacobi_columns(cols, sweeps, tol)
        norms = [math.sqrt(sum(x * x for x in col)) for col in cols]
        order = sorted(range(n), key=lambda j: -norms[j])
        u = [[cols[j][i] / norms[j] if norms[j] > 0 else 0.0 for j in order] for i in range(m)]
        return [norms[j] for j in order], u
    # A^T = U' S V'^T, so the left singular vectors of A are the rotations V'
    cols = [[float(a[i][j]) for j in range(n)] for i in range(m)]
    v = _jacobi_columns(cols, sweeps, tol)
    norms = [math.sqrt(sum(x * x for x in col)) for col in cols]
    order = sorted(range(m), key=lambda j: -norms[j])
    u = [[v[i][j] for j in order] for i in range(m)]
    return [norms[j] for j in order], u


def winding_number(x: float, y: float, ring) -> int:
    """Signed crossing count (Sunday's algorithm)."""
    wn = 0
    for (x1, y1), (x2, y2) in zip(ring, ring[1:]):
        cross = (x2 - x1) * (y - y1) - (x - x1) * (y2 - y1)
        if y1 <= y:
            if y2 > y and cross > 0:
                wn += 1
        elif y2 <= y and cross < 0:
            wn -= 1
    return wn


def dense_bow(doc, tokens):
    out = [0.0] * len(tokens)
    for i, tok in enumerate(tokens):
        for t in doc:
            if t == tok:
                out[i] += 1.0
    return out


def dense_tfidf(docs, tokens):
    n = len(docs)
    idf = []
    for tok in tokens:
        df = 0
        for d in docs:
            if tok in d:
                df += 1
        idf.append(math.log((1 + n) / (1 + df)) + 1)
    rows = []
    for d in docs:
        w = [c * i for c, i in zip(dense_bow(d, tokens), idf)]
        norm = math.sqrt(sum(x * x for x in w))
        rows.append([x / norm for x in w] if norm > 0 else w)
    return idf, rows


def substring_candidates(keywords, hashtag_dict):
    out = set()
    for tag in hashtag_dict:
        for k in keywords:
            k = "".join(k.split())
            if k and tag.find(k) >= 0:
                out.add(tag)
    return out


def scan_hashtags(texts):
    """Character scanner (no regex): a token is an optional '#'/'@' then a run of [a-z0-9_]."""
    counts = defaultdict(int)
    word = set("abcdefghijklmnopqrstuvwxyz0123456789_")
    for text in texts:
        s = text.lower()
        i = 0
        while i < len(s):
            if s[i] in word:
                while i < len(s) and s[i] in word:
                    i += 1
            elif s[i] in "#@" and i + 1 < len(s) and s[i + 1] in word:
                j = i + 1
                while j < len(s) and s[j] in word:
                    j += 1
                if s[i] == "#":
                    counts[s[i + 1 : j]] += 1
                i = j
            else:
                i += 1
    return dict(counts)


def brute_spammers(tweets, threshold):
    users = {t.user_id for t in tweets}
    flagged = set()
    for u in users:
        days = {t.timestamp.date() for t in tweets if t.user_id == u}
        for d in days:
            if sum(1 for t in tweets if t.user_id == u and t.timestamp.date() == d) > threshold:
                flagged.add(u)
    return flagged


def central_diff(f, x, eps: float = 1e-6):
    """Numerical gradient of scalar f at array x (modified in place, restored)."""
    import numpy as np

    g = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        old = x[idx]
        x[idx] = old + eps
        fp = f()
        x[idx] = old - eps
        fm = f()
        x[idx] = old
        g[idx] = (fp - fm) / (2 * eps)
    return g


def rel_err(a, b) -> float:
    import numpy as np

    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-12))
