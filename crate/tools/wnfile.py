"""Minimal reader/writer for WordNet 3.0 data.* / index.* files.

Only what the fixture generators need: synsets with lemmas, hypernym and
hyponym pointers, glosses, and verb frames carried through verbatim.
Written files get freshly computed byte offsets, so any subset of a real
database round-trips into a loadable database.
"""

import os

POS_FILES = {"n": "noun", "v": "verb", "a": "adj", "r": "adv"}
KEPT_POINTERS = {"@", "@i", "~", "~i"}

LICENSE_HEADER = """\
  1 This software and database is being provided to you, the LICENSEE, by
  2 Princeton University under the following license.  By obtaining, using
  3 and/or copying this software and database, you agree that you have
  4 read, understood, and will comply with these terms and conditions.:
  5
  6 Permission to use, copy, modify and distribute this software and
  7 database and its documentation for any purpose and without fee or
  8 royalty is hereby granted, provided that you agree to comply with
  9 the following copyright notice and statements, including the disclaimer,
  10 and that the same appear on ALL copies of the software, database and
  11 documentation, including modifications that you make for internal
  12 use or for distribution.
  13
  14 WordNet 3.0 Copyright 2006 by Princeton University.  All rights reserved.
  15
  16 THIS SOFTWARE AND DATABASE IS PROVIDED "AS IS" AND PRINCETON
  17 UNIVERSITY MAKES NO REPRESENTATIONS OR WARRANTIES, EXPRESS OR
  18 IMPLIED.  BY WAY OF EXAMPLE, BUT NOT LIMITATION, PRINCETON
  19 UNIVERSITY MAKES NO REPRESENTATIONS OR WARRANTIES OF MERCHANT-
  20 ABILITY OR FITNESS FOR ANY PARTICULAR PURPOSE OR THAT THE USE
  21 OF THE LICENSED SOFTWARE, DATABASE OR DOCUMENTATION WILL NOT
  22 INFRINGE ANY THIRD PARTY PATENTS, COPYRIGHTS, TRADEMARKS OR
  23 OTHER RIGHTS.
  24
  25 The name of Princeton University or Princeton may not be used in
  26 advertising or publicity pertaining to distribution of the software
  27 and/or database.  Title to copyright in this software, database and
  28 any accompanying documentation shall at all times remain with
  29 Princeton University and LICENSEE agrees to be bound by any
"""


class Synset:
    def __init__(self, key, lex_filenum, ss_type, words, pointers, frames, gloss):
        self.key = key  # (pos, original offset)
        self.lex_filenum = lex_filenum
        self.ss_type = ss_type
        self.words = words  # list of (lemma, lex_id)
        self.pointers = pointers  # list of (symbol, (pos, offset), source_target)
        self.frames = frames  # verbatim frame text for verbs, "" otherwise
        self.gloss = gloss

    @property
    def pos(self):
        return self.key[0]

    def hypernyms(self):
        return [k for s, k, _ in self.pointers if s in ("@", "@i")]

    def hyponyms(self):
        return [k for s, k, _ in self.pointers if s in ("~", "~i")]


def _file_pos(ss_type):
    return "a" if ss_type == "s" else ss_type


def read_data(path, pos):
    synsets = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.startswith("  "):
                continue
            head, _, gloss = line.partition("|")
            fields = head.split()
            offset = int(fields[0])
            lex_filenum = int(fields[1])
            ss_type = fields[2]
            w_cnt = int(fields[3], 16)
            i = 4
            words = []
            for _ in range(w_cnt):
                words.append((fields[i], int(fields[i + 1], 16)))
                i += 2
            p_cnt = int(fields[i])
            i += 1
            pointers = []
            for _ in range(p_cnt):
                sym, off, ppos, st = fields[i : i + 4]
                pointers.append((sym, (_file_pos(ppos), int(off)), st))
                i += 4
            frames = " ".join(fields[i:])
            synsets[(pos, offset)] = Synset(
                (pos, offset), lex_filenum, ss_type, words, pointers, frames, gloss.strip()
            )
    return synsets


def read_index(path):
    """Returns {lemma: [offsets in sense order]}."""
    index = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.startswith("  "):
                continue
            fields = line.split()
            lemma = fields[0]
            synset_cnt = int(fields[2])
            index[lemma] = [int(x) for x in fields[-synset_cnt:]]
    return index


def read_wordnet(directory, parts=("n", "v")):
    synsets = {}
    index = {}
    for pos in parts:
        name = POS_FILES[pos]
        synsets.update(read_data(os.path.join(directory, "data." + name), pos))
        index[pos] = read_index(os.path.join(directory, "index." + name))
    return synsets, index


def split_gloss(gloss):
    """Splits a raw gloss into (definition, [examples])."""
    parts = [p.strip() for p in gloss.split(";")]
    definition = []
    examples = []
    for p in parts:
        if p.startswith('"'):
            examples.append(p.strip('"'))
        elif not examples:
            definition.append(p)
    return "; ".join(d for d in definition if d), examples


def _format_line(offset, s, new_offset_of):
    words = " ".join("%s %x" % (w, lid) for w, lid in s.words)
    ptrs = []
    for sym, key, st in s.pointers:
        if key not in new_offset_of:
            continue
        ptrs.append("%s %08d %s %s" % (sym, new_offset_of[key], key[0], st))
    line = "%08d %02d %s %02x %s %03d" % (
        offset,
        s.lex_filenum,
        s.ss_type,
        len(s.words),
        words,
        len(ptrs),
    )
    if ptrs:
        line += " " + " ".join(ptrs)
    if s.frames:
        line += " " + s.frames
    line += " | " + s.gloss + "  \n"
    return line


def write_wordnet(directory, synsets, parts=("n", "v", "a", "r")):
    """Writes data.* and index.* for the given synsets (dict key -> Synset).

    Pointers whose target is not in `synsets` are dropped.  Only the pointer
    symbols in KEPT_POINTERS survive.
    """
    os.makedirs(directory, exist_ok=True)
    for s in synsets.values():
        s.pointers = [p for p in s.pointers if p[0] in KEPT_POINTERS and p[1] in synsets]

    header_len = len(LICENSE_HEADER.encode("utf-8"))
    new_offset_of = {}
    ordered = {}
    for pos in parts:
        keys = sorted(k for k in synsets if k[0] == pos)
        ordered[pos] = keys
        # Offsets are printed with a fixed width, so line length does not
        # depend on the offset values themselves.
        cursor = header_len
        for k in keys:
            new_offset_of[k] = cursor
            cursor += len(_format_line(0, synsets[k], {kk: 0 for kk in synsets}).encode("utf-8"))
    for pos in parts:
        name = POS_FILES[pos]
        with open(os.path.join(directory, "data." + name), "w", encoding="utf-8", newline="\n") as f:
            f.write(LICENSE_HEADER)
            for k in ordered[pos]:
                f.write(_format_line(new_offset_of[k], synsets[k], new_offset_of))
        lemma_senses = {}
        for k in ordered[pos]:
            for w, _ in synsets[k].words:
                lemma = w.lower()
                if lemma.endswith(")") and "(" in lemma:
                    lemma = lemma[: lemma.index("(")]
                lemma_senses.setdefault(lemma, [])
                if k not in lemma_senses[lemma]:
                    lemma_senses[lemma].append(k)
        with open(os.path.join(directory, "index." + name), "w", encoding="utf-8", newline="\n") as f:
            f.write(LICENSE_HEADER)
            for lemma in sorted(lemma_senses):
                keys = sorted(lemma_senses[lemma], key=lambda k: sense_rank(synsets, lemma, k))
                syms = sorted({p[0] for k in keys for p in synsets[k].pointers})
                f.write(
                    "%s %s %d %d %s%d 0 %s  \n"
                    % (
                        lemma,
                        pos,
                        len(keys),
                        len(syms),
                        "".join(s + " " for s in syms),
                        len(keys),
                        " ".join("%08d" % new_offset_of[k] for k in keys),
                    )
                )
    return new_offset_of


_SENSE_ORDER = {}


def set_sense_order(order):
    """order: {(pos, lemma): [keys in sense order]} from the source index."""
    _SENSE_ORDER.clear()
    _SENSE_ORDER.update(order)


def sense_rank(synsets, lemma, key):
    order = _SENSE_ORDER.get((key[0], lemma))
    if order and key in order:
        return (order.index(key), key[1])
    return (len(order or []), key[1])
