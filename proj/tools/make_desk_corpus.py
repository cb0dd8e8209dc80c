#!/usr/bin/env python3
# Copyright (c) 2026 The kws-accel Authors. All rights reserved.
# SPDX-License-Identifier: Apache-2.0
"""Build a small synthetic keyword corpus with the espeak-ng engine.

Each clip is one second of 16 kHz, 16-bit mono PCM holding one spoken word.
Speaker variety comes from espeak voice variants, speaking rate, pitch,
onset jitter, gain and additive noise. Output is deterministic for a seed.

    pip install espeakng-loader numpy scipy
    python3 tools/make_desk_corpus.py --out build/desk_corpus
"""

import argparse
import ctypes
import os
import sys
import wave

import numpy as np
from scipy.signal import resample_poly

KEYWORDS = ["forward", "backward", "left", "right", "stop"]
NEGATIVES = ["hello", "music", "seven", "window", "yellow", "morning", "table", "open"]
# Variants without random flutter, so synthesis is reproducible.
TRAIN_VOICES = ["en+Alex", "en+adam", "en+david", "en+Lee", "en-us+mike2", "en-us+shelby"]
TEST_VOICES = ["en+Denis", "en+Hugo", "en+benjamin", "en+michel", "en-us+announcer",
               "en-us+edward2", "en-us+Storm"]
RATE = 16000


class Espeak:
    def __init__(self):
        try:
            import espeakng_loader
        except ImportError:
            sys.exit("make_desk_corpus: the espeakng-loader package is required "
                     "(pip install espeakng-loader)")
        self.lib = ctypes.CDLL(espeakng_loader.get_library_path())
        cb_type = ctypes.CFUNCTYPE(ctypes.c_int, ctypes.POINTER(ctypes.c_short),
                                   ctypes.c_int, ctypes.c_void_p)
        self.chunks = []

        def on_audio(wav, n, _events):
            if n > 0:
                self.chunks.append(np.ctypeslib.as_array(wav, shape=(n,)).copy())
            return 0

        self._cb = cb_type(on_audio)
        data = espeakng_loader.get_data_path().encode()
        # AUDIO_OUTPUT_RETRIEVAL = 1
        self.rate = self.lib.espeak_Initialize(1, 0, data, 0)
        if self.rate <= 0:
            sys.exit("make_desk_corpus: espeak_Initialize failed")
        self.lib.espeak_SetSynthCallback(self._cb)

    def say(self, text, voice, wpm, pitch):
        if self.lib.espeak_SetVoiceByName(voice.encode()) != 0:
            raise RuntimeError(f"unknown espeak voice {voice}")
        self.lib.espeak_SetParameter(1, int(wpm), 0)    # espeakRATE
        self.lib.espeak_SetParameter(3, int(pitch), 0)  # espeakPITCH
        self.chunks = []
        t = text.encode()
        self.lib.espeak_Synth(t, len(t) + 1, 0, 0, 0, 0, None, None)
        self.lib.espeak_Synchronize()
        return np.concatenate(self.chunks).astype(np.float64) / 32768.0


def trim(x, rel=0.02):
    idx = np.flatnonzero(np.abs(x) > rel * np.max(np.abs(x)))
    return x[idx[0]:idx[-1] + 1] if idx.size else x


def make_clip(engine, rng, word, voice):
    wpm = rng.uniform(140, 200)
    pitch = rng.uniform(30, 70)
    raw = engine.say(word, voice, wpm, pitch)
    speech = trim(resample_poly(raw, RATE, engine.rate))[: RATE - 800]
    speech = speech / np.max(np.abs(speech)) * rng.uniform(0.3, 0.8)

    clip = np.zeros(RATE)
    centre = (RATE - speech.size) // 2
    jitter = int(rng.uniform(-0.04, 0.04) * RATE)
    start = int(np.clip(centre + jitter, 0, RATE - speech.size))
    clip[start:start + speech.size] = speech

    speech_rms = np.sqrt(np.mean(speech ** 2))
    snr_db = rng.uniform(20, 35)
    clip += rng.normal(0.0, speech_rms / 10 ** (snr_db / 20), RATE)
    return np.clip(np.round(clip * 32768.0), -32768, 32767).astype(np.int16)


def write_wav(path, samples):
    with wave.open(path, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(RATE)
        w.writeframes(samples.astype("<i2").tobytes())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", required=True)
    ap.add_argument("--seed", type=int, default=2026)
    ap.add_argument("--train-per-keyword", type=int, default=8)
    ap.add_argument("--test-per-keyword", type=int, default=12)
    ap.add_argument("--negative-test", type=int, default=10)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    engine = Espeak()
    os.makedirs(os.path.join(args.out, "clips"), exist_ok=True)
    lines = ["#keywords\t" + "\t".join(KEYWORDS)]

    def emit(word, label, split, voice, n):
        rel = f"clips/{split}_{word}_{n:02d}.wav"
        write_wav(os.path.join(args.out, rel), make_clip(engine, rng, word, voice))
        lines.append(f"{rel}\t{label}\t{split}")

    for kw in KEYWORDS:
        for n in range(args.train_per_keyword):
            emit(kw, kw, "train", TRAIN_VOICES[n % len(TRAIN_VOICES)], n)
        for n in range(args.test_per_keyword):
            emit(kw, kw, "test", TEST_VOICES[n % len(TEST_VOICES)], n)
    for n in range(args.negative_test):
        word = NEGATIVES[n % len(NEGATIVES)]
        emit(word, "-", "test", TEST_VOICES[n % len(TEST_VOICES)], n)

    with open(os.path.join(args.out, "manifest.tsv"), "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {len(lines) - 1} clips to {args.out}")


if __name__ == "__main__":
    main()
