#!/usr/bin/env python3
"""Trains the fixture MLP shipped under tests/fixtures/.

Two classes of 8x8 stroke patterns (horizontal vs. vertical bars), each
rendered at 2x to a 16x16 grayscale image in [0, 1] with random shift,
contrast and noise. A 256-32-2 ReLU network is fit with plain minibatch
SGD on softmax cross-entropy. Output is deterministic for a given seed.

Usage: train_pattern_mlp.py OUT_DIR
Writes pattern_mlp.json, source.pgm (class 0), reference.pgm (class 1),
and a few extra held-out images used by the sweep/crossover scripts.
"""

import json
import sys
from pathlib import Path

import numpy as np

PATTERN = 8
SCALE = 2
SIDE = PATTERN * SCALE


def template(cls: int, rng: np.random.Generator) -> np.ndarray:
    t = np.zeros((PATTERN, PATTERN))
    bars = rng.choice(np.arange(1, PATTERN - 1), size=2, replace=False)
    for b in bars:
        if cls == 0:
            t[b, 1 : PATTERN - 1] = 1.0
        else:
            t[1 : PATTERN - 1, b] = 1.0
    return t


def render(cls: int, rng: np.random.Generator) -> np.ndarray:
    t = template(cls, rng)
    img = np.kron(t, np.ones((SCALE, SCALE)))
    img = np.roll(img, rng.integers(-1, 2), axis=0)
    img = np.roll(img, rng.integers(-1, 2), axis=1)
    lo = rng.uniform(0.05, 0.25)
    hi = rng.uniform(0.7, 0.95)
    img = lo + (hi - lo) * img + rng.normal(0.0, 0.04, img.shape)
    return np.clip(img, 0.0, 1.0)


def dataset(n: int, rng: np.random.Generator):
    xs, ys = [], []
    for i in range(n):
        c = i % 2
        xs.append(render(c, rng).reshape(-1))
        ys.append(c)
    return np.array(xs), np.array(ys)


def train(x, y, rng, hidden=32, epochs=60, lr=0.05, batch=32):
    d = x.shape[1]
    w1 = rng.normal(0, np.sqrt(2.0 / d), (hidden, d))
    b1 = np.zeros(hidden)
    w2 = rng.normal(0, np.sqrt(2.0 / hidden), (2, hidden))
    b2 = np.zeros(2)
    for _ in range(epochs):
        order = rng.permutation(len(x))
        for s in range(0, len(x), batch):
            idx = order[s : s + batch]
            xb, yb = x[idx], y[idx]
            z1 = xb @ w1.T + b1
            h = np.maximum(z1, 0)
            z2 = h @ w2.T + b2
            z2 -= z2.max(axis=1, keepdims=True)
            p = np.exp(z2)
            p /= p.sum(axis=1, keepdims=True)
            g2 = p.copy()
            g2[np.arange(len(yb)), yb] -= 1.0
            g2 /= len(yb)
            gw2 = g2.T @ h
            gb2 = g2.sum(axis=0)
            gh = g2 @ w2
            gh[z1 <= 0] = 0
            gw1 = gh.T @ xb
            gb1 = gh.sum(axis=0)
            w1 -= lr * gw1
            b1 -= lr * gb1
            w2 -= lr * gw2
            b2 -= lr * gb2
    return w1, b1, w2, b2


def predict(params, x):
    w1, b1, w2, b2 = params
    h = np.maximum(x @ w1.T + b1, 0)
    return np.argmax(h @ w2.T + b2, axis=1)


def write_pgm(path: Path, img: np.ndarray):
    q = np.floor(img * 255.0 + 0.5).clip(0, 255).astype(np.uint8)
    path.write_bytes(f"P5\n{SIDE} {SIDE}\n255\n".encode() + q.tobytes())


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20190125)
    xtr, ytr = dataset(2000, rng)
    xte, yte = dataset(400, rng)
    # Round to what the JSON stores so the checks below see the shipped model.
    params = tuple(np.round(a, 6) for a in train(xtr, ytr, rng))
    acc = (predict(params, xte) == yte).mean()
    print(f"held-out accuracy: {acc:.4f}")

    w1, b1, w2, b2 = params
    doc = {
        "num_classes": 2,
        "input_shape": [SIDE, SIDE, 1],
        "layers": [
            {"rows": int(w1.shape[0]), "cols": int(w1.shape[1]), "activation": "relu",
             "weights": [float(v) for v in w1.reshape(-1)],
             "bias": [float(v) for v in b1]},
            {"rows": 2, "cols": int(w2.shape[1]), "activation": "identity",
             "weights": [float(v) for v in w2.reshape(-1)],
             "bias": [float(v) for v in b2]},
        ],
    }
    (out / "pattern_mlp.json").write_text(json.dumps(doc) + "\n")

    # Fixture images: correctly classified held-out samples, quantized the
    # same way the CLI reads them.
    def pick(cls, k):
        found = []
        while len(found) < k:
            img = np.floor(render(cls, rng) * 255.0 + 0.5) / 255.0
            if predict(params, img.reshape(1, -1))[0] == cls:
                found.append(img)
        return found

    sources = pick(0, 3)
    references = pick(1, 3)
    write_pgm(out / "source.pgm", sources[0])
    write_pgm(out / "reference.pgm", references[0])
    for i in range(1, 3):
        write_pgm(out / f"source_{i}.pgm", sources[i])
        write_pgm(out / f"reference_{i}.pgm", references[i])


if __name__ == "__main__":
    main()
