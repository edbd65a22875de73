"""Builds the desk-scale fixture under fixtures/desk/.

Inputs (none are committed; see tools/README.md for where to get them):
  --wordnet   a WordNet 3.0 dict directory (data.* / index.*)
  --lexicon   a Brill-style "word TAG" lexicon used by the gloss chunker
  --corpora   directory with extra raw text (tagged-en-*.txt, polarity-en-*.csv)

Outputs:
  wordnet/               noun+verb WordNet subset (closed under hypernyms)
  w2v.bin                5k-word skip-gram space, word2vec binary format
  fasttext_words.bin     the same 5k words in a character 3-gram model's space
  fasttext_3grams.bin    that model's 3-gram vectors ("<" and ">" boundary marked)
  defs.tsv               word, pos, synset id, definition, bracketed parse
  MANIFEST               sizes and training settings
"""

import argparse
import collections
import csv
import glob
import hashlib
import os
import re
import struct
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, HERE)

import gloss_chunker  # noqa: E402
import wnfile  # noqa: E402

WORD_RE = re.compile(r"[a-z]+")
LEMMA_RE = re.compile(r"^[a-z]{3,}$")


def stable_key(word):
    return hashlib.md5(word.encode("utf-8")).hexdigest()


def corpus_sentences(wordnet_dir, corpora_dir):
    sents = []
    for pos in ("n", "v", "a", "r"):
        data = wnfile.read_data(os.path.join(wordnet_dir, "data." + wnfile.POS_FILES[pos]), pos)
        for key in sorted(data):
            definition, examples = wnfile.split_gloss(data[key].gloss)
            for text in [definition] + examples:
                toks = WORD_RE.findall(text.lower())
                if toks:
                    sents.append(toks)
    for path in sorted(glob.glob(os.path.join(corpora_dir, "tagged-en-*.txt"))):
        with open(path, encoding="utf-8", errors="replace") as f:
            for line in f:
                words = [t.rsplit("/", 1)[0] for t in line.split()]
                toks = WORD_RE.findall(" ".join(words).lower())
                if toks:
                    sents.append(toks)
    for path in sorted(glob.glob(os.path.join(corpora_dir, "polarity-en-*.csv"))):
        with open(path, encoding="utf-8-sig", errors="replace") as f:
            for row in csv.reader(f):
                if len(row) < 2:
                    continue
                for piece in re.split(r"[.!?]\s", row[1]):
                    toks = WORD_RE.findall(piece.lower())
                    if toks:
                        sents.append(toks)
    return sents


def write_w2v_binary(path, items, dim):
    with open(path, "wb") as f:
        f.write(("%d %d\n" % (len(items), dim)).encode("utf-8"))
        for token, vec in items:
            f.write(token.encode("utf-8") + b" ")
            f.write(struct.pack("<%df" % dim, *[float(x) for x in vec]))
            f.write(b"\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--wordnet", required=True)
    ap.add_argument("--lexicon", required=True)
    ap.add_argument("--corpora", required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--vocab", type=int, default=5000)
    ap.add_argument("--dim", type=int, default=100)
    ap.add_argument("--oov-sister", type=int, default=1600)
    ap.add_argument("--oov-other", type=int, default=600)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    if os.environ.get("PYTHONHASHSEED") != "0":
        os.environ["PYTHONHASHSEED"] = "0"
        os.execv(sys.executable, [sys.executable] + sys.argv)

    from gensim.models import FastText, Word2Vec
    from gensim.models.fasttext_inner import ft_hash_bytes

    os.makedirs(args.out, exist_ok=True)
    synsets, index = wnfile.read_wordnet(args.wordnet, ("n", "v"))
    sense_order = {}
    for pos in ("n", "v"):
        for lemma, offsets in index[pos].items():
            sense_order[(pos, lemma)] = [(pos, o) for o in offsets]
    wnfile.set_sense_order(sense_order)

    print("building corpus", flush=True)
    sents = corpus_sentences(args.wordnet, args.corpora)
    counts = collections.Counter(t for s in sents for t in s)
    print("sentences=%d tokens=%d" % (len(sents), sum(counts.values())), flush=True)

    print("training skip-gram", flush=True)
    w2v = Word2Vec(sents, vector_size=args.dim, window=5, min_count=5, sg=1, negative=5,
                   epochs=8, workers=1, seed=args.seed)
    print("training 3-gram model", flush=True)
    ft = FastText(sents, vector_size=args.dim, window=5, min_count=5, sg=1, negative=5,
                  epochs=5, workers=1, seed=args.seed, min_n=3, max_n=3, bucket=200000)

    ranked = sorted((w for w in w2v.wv.key_to_index if len(w) >= 2),
                    key=lambda w: (-counts[w], w))
    vocab = ranked[: args.vocab]
    vocab_set = set(vocab)

    wn_lemmas = {pos: set(index[pos]) for pos in ("n", "v")}
    iv_words = sorted(w for w in vocab if LEMMA_RE.match(w) and (w in wn_lemmas["n"] or w in wn_lemmas["v"]))

    def first_sense(word, pos):
        offs = index[pos].get(word)
        return (pos, offs[0]) if offs else None

    def lemma_names(key):
        return {w.lower() for w, _ in synsets[key].words}

    def has_iv_sister(key):
        for h in synsets[key].hypernyms():
            for sib in synsets[h].hyponyms():
                if sib != key and any(l in vocab_set and LEMMA_RE.match(l) for l in lemma_names(sib)):
                    return True
        return False

    oov_sister, oov_other = [], []
    for pos in ("n", "v"):
        for lemma in index[pos]:
            if not LEMMA_RE.match(lemma) or lemma in vocab_set or len(lemma) < 4:
                continue
            key = first_sense(lemma, pos)
            (oov_sister if has_iv_sister(key) else oov_other).append((lemma, pos))
    oov_sister = sorted(set(oov_sister), key=lambda lp: stable_key(lp[0] + lp[1]))[: args.oov_sister]
    oov_other = sorted(set(oov_other), key=lambda lp: stable_key(lp[0] + lp[1]))[: args.oov_other]
    oov = sorted(set(oov_sister + oov_other))

    # synset subset: every noun/verb sense of every chosen word, closed upward
    keep = set()
    for w in iv_words:
        for pos in ("n", "v"):
            keep.update((pos, o) for o in index[pos].get(w, []))
    for w, pos in oov:
        keep.update((pos, o) for o in index[pos].get(w, []))
    stack = list(keep)
    while stack:
        k = stack.pop()
        for h in synsets[k].hypernyms():
            if h not in keep:
                keep.add(h)
                stack.append(h)
    subset = {k: synsets[k] for k in keep}
    new_offset = wnfile.write_wordnet(os.path.join(args.out, "wordnet"), subset)
    with open(os.path.join(args.wordnet, "LICENSE"), encoding="utf-8") as src, \
            open(os.path.join(args.out, "wordnet", "LICENSE"), "w", encoding="utf-8") as dst:
        dst.write(src.read())

    lexicon = gloss_chunker.load_lexicon(args.lexicon)
    tagger = gloss_chunker.Tagger(lexicon, wn_lemmas["n"], wn_lemmas["v"])
    records = []
    wanted = [(w, pos) for w in iv_words for pos in ("n", "v") if w in index[pos]] + oov
    for word, pos in sorted(set(wanted)):
        key = first_sense(word, pos)
        definition, _ = wnfile.split_gloss(synsets[key].gloss)
        parsed = gloss_chunker.parse_definition(definition, pos, tagger)
        if parsed is None:
            continue
        clause, tree = parsed
        sid = "%08d-%s" % (new_offset[key], pos)
        records.append((word, pos, sid, definition.replace("\t", " "), tree))
    with open(os.path.join(args.out, "defs.tsv"), "w", encoding="utf-8", newline="\n") as f:
        f.write("# word\tpos\tsynset\tdefinition\tparse\n")
        for r in records:
            f.write("\t".join(r) + "\n")

    write_w2v_binary(os.path.join(args.out, "w2v.bin"), [(w, w2v.wv[w]) for w in vocab], args.dim)
    write_w2v_binary(os.path.join(args.out, "fasttext_words.bin"), [(w, ft.wv[w]) for w in vocab], args.dim)

    trained_ngrams = set()
    for w in ft.wv.key_to_index:
        wrapped = "<" + w + ">"
        trained_ngrams.update(wrapped[i : i + 3] for i in range(len(wrapped) - 2))
    needed = set()
    for w in list(vocab) + [w for w, _ in oov]:
        wrapped = "<" + w + ">"
        needed.update(wrapped[i : i + 3] for i in range(len(wrapped) - 2))
    grams = sorted(needed & trained_ngrams)
    bucket = ft.wv.bucket
    write_w2v_binary(
        os.path.join(args.out, "fasttext_3grams.bin"),
        [(g, ft.wv.vectors_ngrams[ft_hash_bytes(g.encode("utf-8")) % bucket]) for g in grams],
        args.dim,
    )

    n_noun = sum(1 for k in subset if k[0] == "n")
    with open(os.path.join(args.out, "MANIFEST"), "w", encoding="utf-8") as f:
        f.write("vocab %d\ndim %d\niv_wordnet_words %d\noov_words %d\n" % (len(vocab), args.dim, len(iv_words), len(oov)))
        f.write("noun_synsets %d\nverb_synsets %d\n" % (n_noun, len(subset) - n_noun))
        f.write("def_records %d\n3grams %d\n" % (len(records), len(grams)))
        f.write("skipgram window=5 min_count=5 negative=5 epochs=8 seed=%d\n" % args.seed)
        f.write("3gram model window=5 min_count=5 negative=5 epochs=5 min_n=max_n=3 seed=%d\n" % args.seed)
    print(open(os.path.join(args.out, "MANIFEST")).read())


if __name__ == "__main__":
    main()
