#!/usr/bin/env python3
# Copyright 2026 The artlang Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Tags every whole-word vocabulary item in isolation with a spaCy model.

Writes the token<TAB>POS lexicon read by the corpus builder:

    pip install spacy && python -m spacy download en_core_web_sm
    python tools/tag_vocabulary.py path/to/vocab.txt > data/pos_lexicon.tsv

Subword pieces ("##...") and bracketed special tokens are skipped.
"""

import argparse
import sys


def whole_words(vocab_path):
    with open(vocab_path, encoding="utf-8") as f:
        for line in f:
            tok = line.rstrip("\n")
            if not tok or tok.startswith("##"):
                continue
            if tok.startswith("[") and tok.endswith("]"):
                continue
            yield tok


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("vocab", help="WordPiece vocab.txt, one token per line")
    parser.add_argument("--model", default="en_core_web_sm")
    parser.add_argument("--batch-size", type=int, default=2048)
    args = parser.parse_args()

    import spacy  # imported late so --help works without spaCy

    nlp = spacy.load(args.model, disable=["parser", "ner", "lemmatizer"])
    tokens = list(whole_words(args.vocab))
    out = sys.stdout
    out.write(f"# token\tuniversal POS in isolation ({args.model} {spacy.__version__})\n")
    for tok, doc in zip(tokens, nlp.pipe(tokens, batch_size=args.batch_size)):
        # Multi-piece tokenizations (rare, e.g. "can't") take the first label.
        out.write(f"{tok}\t{doc[0].pos_ if len(doc) else 'X'}\n")


if __name__ == "__main__":
    main()
