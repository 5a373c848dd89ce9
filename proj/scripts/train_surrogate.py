#!/usr/bin/env python3
"""Trains the small recurrent surrogate models shipped under data/fixtures.

The models give the quantization sweeps something real to degrade: random
weights score near chance, so precision effects would be invisible.  Training
runs offline; only the exported JSON files and golden score files are used by
the C++ tests.

Pipeline (from the repository root):

    cmake --build build -j
    ./build/rnnfx gen-fixtures --out-dir /tmp/surrogate-data --samples 4000
    python3 scripts/train_surrogate.py --data /tmp/surrogate-data/binary-sequences.csv

Outputs, per cell type:
  data/fixtures/top_<cell>_surrogate.json   model in the library's JSON format
  tests/data/top_<cell>_surrogate_scores.csv  float64 forward-pass scores for
      the first --golden-rows rows, written by an independent NumPy
      implementation (cross-checked against Keras during training)

The golden rows are reproducible in C++ because the synthetic generator is a
counter-based stream: the first N rows do not depend on the total sample
count.
"""

import argparse
import csv
import json
import os
import sys

import numpy as np


def load_csv(path):
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        tag = header[-1]  # t{S-1}_f{D-1}
        t_part, f_part = tag.split("_")
        seq_len = int(t_part[1:]) + 1
        input_dim = int(f_part[1:]) + 1
        labels, rows = [], []
        for line in reader:
            labels.append(int(line[0]))
            rows.append([float(v) for v in line[1:]])
    x = np.asarray(rows, dtype=np.float64).reshape(len(rows), seq_len, input_dim)
    y = np.asarray(labels, dtype=np.int64)
    return x, y


def roc_auc(scores, labels):
    order = np.argsort(scores, kind="stable")
    s = np.asarray(scores)[order]
    l = np.asarray(labels)[order]
    n = len(s)
    # doubled midranks keep everything in integers
    rank2 = np.empty(n, dtype=np.int64)
    i = 0
    while i < n:
        j = i
        while j < n and s[j] == s[i]:
            j += 1
        rank2[i:j] = i + 1 + j
        i = j
    n_pos = int(l.sum())
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("degenerate labels")
    u2 = int(rank2[l == 1].sum()) - n_pos * (n_pos + 1)
    return u2 / (2.0 * n_pos * n_neg)


def sigmoid(v):
    return 1.0 / (1.0 + np.exp(-v))


def forward(model_dict, x):
    """Float64 forward pass over the exported JSON structure."""
    out = []
    for row in x:
        h = None
        v = None
        for layer in model_dict["layers"]:
            kind = layer["kind"]
            if kind in ("lstm", "gru"):
                w = layer["weights"]
                k = np.asarray(w["kernel"], dtype=np.float64)
                rk = np.asarray(w["recurrent_kernel"], dtype=np.float64)
                b = np.asarray(w["bias"], dtype=np.float64)
                units = layer["units"]
                h = np.zeros(units)
                if kind == "lstm":
                    c = np.zeros(units)
                    for t in range(layer["seq_len"]):
                        z = row[t] @ k + h @ rk + b
                        i_g = sigmoid(z[:units])
                        f_g = sigmoid(z[units : 2 * units])
                        g_g = np.tanh(z[2 * units : 3 * units])
                        o_g = sigmoid(z[3 * units :])
                        c = f_g * c + i_g * g_g
                        h = o_g * np.tanh(c)
                else:
                    b_in, b_rec = b[: 3 * units], b[3 * units :]
                    for t in range(layer["seq_len"]):
                        mx = row[t] @ k + b_in
                        mh = h @ rk + b_rec
                        z_g = sigmoid(mx[:units] + mh[:units])
                        r_g = sigmoid(mx[units : 2 * units] + mh[units : 2 * units])
                        hh = np.tanh(mx[2 * units :] + r_g * mh[2 * units :])
                        h = z_g * h + (1.0 - z_g) * hh
                v = h
            elif kind == "dense":
                w = layer["weights"]
                v = v @ np.asarray(w["kernel"], dtype=np.float64) + np.asarray(
                    w["bias"], dtype=np.float64
                )
            elif kind == "relu":
                v = np.maximum(v, 0.0)
            elif kind == "sigmoid":
                v = sigmoid(v)
            elif kind == "tanh":
                v = np.tanh(v)
            elif kind == "softmax":
                e = np.exp(v - v.max())
                v = e / e.sum()
            else:
                raise ValueError(f"unknown layer kind {kind}")
        out.append(v.copy())
    return np.asarray(out)


def build_keras(cell, seq_len, input_dim, units, seed):
    import tensorflow as tf

    tf.keras.utils.set_random_seed(seed)
    if cell == "lstm":
        rnn = tf.keras.layers.LSTM(units)
    else:
        rnn = tf.keras.layers.GRU(units, reset_after=True)
    model = tf.keras.Sequential(
        [
            tf.keras.Input(shape=(seq_len, input_dim)),
            rnn,
            tf.keras.layers.Dense(64, activation="relu"),
            tf.keras.layers.Dense(1, activation="sigmoid"),
        ]
    )
    model.compile(
        optimizer=tf.keras.optimizers.Adam(1e-2),
        loss="binary_crossentropy",
    )
    return model


def export_dict(keras_model, cell, seq_len, input_dim, units, metadata):
    ws = keras_model.get_weights()
    k, rk, b = ws[0], ws[1], ws[2]
    # reset_after GRU bias arrives as (2, 3*units): input row then recurrent
    # row; the JSON format concatenates them in that order.
    bias = np.asarray(b, dtype=np.float64).reshape(-1)
    layers = [
        {
            "kind": cell,
            "input_dim": input_dim,
            "units": units,
            "seq_len": seq_len,
            "return_sequences": False,
            **({"reset_after": True} if cell == "gru" else {}),
            "weights": {
                "kernel": np.asarray(k, dtype=np.float64).tolist(),
                "recurrent_kernel": np.asarray(rk, dtype=np.float64).tolist(),
                "bias": bias.tolist(),
            },
        },
        {
            "kind": "dense",
            "input_dim": units,
            "units": 64,
            "weights": {
                "kernel": np.asarray(ws[3], dtype=np.float64).tolist(),
                "bias": np.asarray(ws[4], dtype=np.float64).tolist(),
            },
        },
        {"kind": "relu", "input_dim": 64, "units": 64},
        {
            "kind": "dense",
            "input_dim": 64,
            "units": 1,
            "weights": {
                "kernel": np.asarray(ws[5], dtype=np.float64).tolist(),
                "bias": np.asarray(ws[6], dtype=np.float64).tolist(),
            },
        },
        {"kind": "sigmoid", "input_dim": 1, "units": 1},
    ]
    return {"name": f"top-{cell}-surrogate", "layers": layers, "metadata": metadata}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data", required=True, help="binary-sequences.csv from gen-fixtures")
    ap.add_argument("--out-dir", default="data/fixtures")
    ap.add_argument("--golden-dir", default="tests/data")
    ap.add_argument("--cells", nargs="+", default=["lstm", "gru"], choices=["lstm", "gru"])
    ap.add_argument("--units", type=int, default=20)
    ap.add_argument("--epochs", type=int, default=30)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--holdout", type=int, default=1000)
    ap.add_argument("--golden-rows", type=int, default=32)
    ap.add_argument("--min-auc", type=float, default=0.85)
    args = ap.parse_args()

    x, y = load_csv(args.data)
    n = len(y)
    n_train = n - args.holdout
    if n_train <= 0:
        sys.exit("holdout larger than the dataset")
    seq_len, input_dim = x.shape[1], x.shape[2]
    print(f"data: {n} rows of {seq_len}x{input_dim}, training on {n_train}")

    os.makedirs(args.out_dir, exist_ok=True)
    os.makedirs(args.golden_dir, exist_ok=True)

    for cell in args.cells:
        model = build_keras(cell, seq_len, input_dim, args.units, args.seed)
        model.fit(
            x[:n_train].astype(np.float32),
            y[:n_train].astype(np.float32),
            epochs=args.epochs,
            batch_size=64,
            verbose=0,
        )
        keras_scores = model.predict(x.astype(np.float32), verbose=0).reshape(-1)
        auc = roc_auc(keras_scores[n_train:], y[n_train:])
        print(f"{cell}: holdout auc {auc:.4f}")
        if auc < args.min_auc:
            sys.exit(f"{cell}: holdout auc {auc:.4f} below {args.min_auc}; not exporting")

        metadata = {
            "trained_by": "scripts/train_surrogate.py",
            "train_rows": str(n_train),
            "train_data": os.path.basename(args.data),
            "holdout_auc": f"{auc:.4f}",
            "keras_seed": str(args.seed),
        }
        exported = export_dict(model, cell, seq_len, input_dim, args.units, metadata)

        # Independent float64 forward pass; must agree with Keras to float32
        # noise, or the export transcription is wrong.
        probe = forward(exported, x[: args.golden_rows]).reshape(-1)
        drift = np.abs(probe - keras_scores[: args.golden_rows].astype(np.float64)).max()
        print(f"{cell}: max |float64 - keras| on golden rows = {drift:.3g}")
        if drift > 1e-4:
            sys.exit(f"{cell}: exported weights disagree with keras (drift {drift:.3g})")

        model_path = os.path.join(args.out_dir, f"top_{cell}_surrogate.json")
        with open(model_path, "w") as f:
            json.dump(exported, f, indent=1)
            f.write("\n")
        print(f"wrote {model_path}")

        golden_path = os.path.join(args.golden_dir, f"top_{cell}_surrogate_scores.csv")
        with open(golden_path, "w") as f:
            f.write("# schema: rnnfx.golden-scores.v1\n")
            f.write("row,label,score\n")
            for i in range(args.golden_rows):
                f.write(f"{i},{y[i]},{probe[i]:.17g}\n")
        print(f"wrote {golden_path}")


if __name__ == "__main__":
    main()
