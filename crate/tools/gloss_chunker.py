"""A small rule-based tagger and chunker for WordNet glosses.

This is a fixture generator, not a general parser: it emits Penn-style
bracketed trees shaped like typical constituency-parser output for the
narrow sentence types found in dictionary glosses ("a DET ADJ NOUN of ...",
"VERB the NOUN from ...", "someone who VERBs ...").  Open-class tags come
from a Brill-style lexicon ("word TAG" per line); context rules fix the
usual gloss-specific ambiguities.
"""

import re

CLOSED = {
    "a": "DT", "an": "DT", "the": "DT", "this": "DT", "these": "DT", "those": "DT",
    "some": "DT", "any": "DT", "each": "DT", "every": "DT", "no": "DT", "another": "DT",
    "all": "DT", "both": "DT", "either": "DT", "neither": "DT",
    "of": "IN", "in": "IN", "on": "IN", "at": "IN", "by": "IN", "for": "IN", "with": "IN",
    "from": "IN", "into": "IN", "onto": "IN", "about": "IN", "as": "IN", "like": "IN",
    "through": "IN", "over": "IN", "under": "IN", "between": "IN", "among": "IN",
    "against": "IN", "without": "IN", "within": "IN", "during": "IN", "after": "IN",
    "before": "IN", "around": "IN", "toward": "IN", "towards": "IN", "across": "IN",
    "along": "IN", "upon": "IN", "above": "IN", "below": "IN", "behind": "IN",
    "beyond": "IN", "near": "IN", "than": "IN", "because": "IN", "if": "IN",
    "while": "IN", "whether": "IN", "since": "IN", "until": "IN", "although": "IN",
    "though": "IN", "per": "IN", "via": "IN", "beneath": "IN", "inside": "IN",
    "outside": "IN", "throughout": "IN", "underneath": "IN", "except": "IN",
    "to": "TO", "and": "CC", "or": "CC", "but": "CC", "nor": "CC",
    "which": "WDT", "who": "WP", "whom": "WP", "whose": "WP$", "what": "WP",
    "where": "WRB", "when": "WRB", "how": "WRB", "why": "WRB",
    "it": "PRP", "they": "PRP", "them": "PRP", "he": "PRP", "she": "PRP", "you": "PRP",
    "we": "PRP", "us": "PRP", "him": "PRP", "itself": "PRP", "oneself": "PRP",
    "themselves": "PRP", "himself": "PRP", "herself": "PRP",
    "its": "PRP$", "his": "PRP$", "her": "PRP$", "their": "PRP$", "your": "PRP$",
    "our": "PRP$", "one's": "PRP$", "someone's": "PRP$",
    "is": "VBZ", "are": "VBP", "was": "VBD", "were": "VBD", "be": "VB", "been": "VBN",
    "being": "VBG", "has": "VBZ", "have": "VBP", "had": "VBD", "does": "VBZ", "did": "VBD",
    "can": "MD", "could": "MD", "may": "MD", "might": "MD", "must": "MD", "should": "MD",
    "will": "MD", "would": "MD", "shall": "MD",
    "not": "RB", "very": "RB", "especially": "RB", "usually": "RB", "often": "RB",
    "typically": "RB", "also": "RB", "so": "RB", "too": "RB", "only": "RB",
    "more": "RBR", "less": "RBR", "most": "RBS",
    "someone": "NN", "somebody": "NN", "something": "NN", "anything": "NN",
    "'s": "POS", ",": ",", ":": ":", ".": ".",
}

PARTICLES = {"up", "out", "down", "off", "away", "back"}
NOUN_TAGS = {"NN", "NNS", "NNP", "NNPS"}
PREMOD_TAGS = {"JJ", "JJR", "JJS", "VBN", "VBG", "CD"}
DET_TAGS = {"DT", "PRP$", "PDT"}

TOKEN_RE = re.compile(r"[A-Za-z]+(?:[-'][A-Za-z]+)*(?:'s)?|\d+(?:\.\d+)?|[^\sA-Za-z\d]")


def load_lexicon(path):
    lex = {}
    with open(path, encoding="utf-8", errors="replace") as f:
        for line in f:
            if line.startswith(";"):
                continue
            parts = line.split()
            if len(parts) >= 2 and parts[0] not in lex:
                lex[parts[0]] = parts[1]
    return lex


def clean_definition(text):
    text = re.sub(r"\([^()]*\)", " ", text)
    text = text.split(";")[0]
    text = text.replace("`", "").replace('"', "")
    return " ".join(text.split())


def tokenize(text):
    out = []
    for tok in TOKEN_RE.findall(text):
        low = tok.lower()
        if low.endswith("'s") and low not in CLOSED:
            out.append(tok[:-2])
            out.append("'s")
        else:
            out.append(tok)
    return out


class Tagger:
    def __init__(self, lexicon, noun_lemmas, verb_lemmas):
        self.lex = lexicon
        self.nouns = noun_lemmas
        self.verbs = verb_lemmas

    @staticmethod
    def _bases(word):
        w = word.lower()
        yield w
        for suffix, repl in (("ies", "y"), ("es", ""), ("s", ""), ("ed", ""), ("ed", "e"),
                             ("ing", ""), ("ing", "e"), ("d", "")):
            if w.endswith(suffix) and len(w) > len(suffix) + 2:
                yield w[: -len(suffix)] + repl

    def verb_capable(self, word):
        return any(b in self.verbs for b in self._bases(word))

    def noun_capable(self, word):
        return any(b in self.nouns for b in self._bases(word))

    def base_tag(self, word):
        low = word.lower()
        if low in CLOSED:
            return CLOSED[low]
        if re.fullmatch(r"\d+(\.\d+)?", word):
            return "CD"
        tag = self.lex.get(low) or self.lex.get(word)
        if tag:
            if tag in ("NNP", "NNPS") and word == low:
                tag = "NN" if tag == "NNP" else "NNS"
            if tag in ("UH", "SYM", "LS", "FW", "EX"):
                tag = "NN"
            return tag
        if low.endswith("ly"):
            return "RB"
        if low.endswith("ing"):
            return "VBG"
        if low.endswith("ed"):
            return "VBN"
        if "-" in low:
            return "JJ"
        if low.endswith("s") and not low.endswith("ss") and self.noun_capable(low[:-1]):
            return "NNS"
        return "NN"

    def tag(self, tokens, gloss_pos):
        tags = [self.base_tag(t) for t in tokens]
        n = len(tokens)
        for i, w in enumerate(tokens):
            low = w.lower()
            prev = tags[i - 1] if i > 0 else None
            nxt = tags[i + 1] if i + 1 < n else None
            if gloss_pos == "v" and i == 0 and self.verb_capable(w):
                tags[i] = "VB"
            elif prev == "TO" and self.verb_capable(w) and tags[i] not in DET_TAGS:
                tags[i] = "VB"
            elif (prev in DET_TAGS or prev in ("JJ", "POS")) and tags[i].startswith("VB") \
                    and tags[i] not in ("VBG", "VBN") and self.noun_capable(w):
                tags[i] = "NNS" if low.endswith("s") and low not in self.nouns else "NN"
            elif prev in ("WDT", "WP") and tags[i] in NOUN_TAGS and self.verb_capable(w):
                tags[i] = "VBZ" if low.endswith("s") else "VBP"
            elif prev == "CC" and i >= 2 and tags[i - 2] == "VB" and self.verb_capable(w):
                tags[i] = "VB"
            if low == "that":
                if prev in NOUN_TAGS and nxt is not None and (nxt.startswith("VB") or nxt in ("MD", "RB")):
                    tags[i] = "WDT"
                elif nxt in NOUN_TAGS or nxt in ("JJ",):
                    tags[i] = "DT"
                else:
                    tags[i] = "IN"
            if low == "one":
                tags[i] = "NN" if (nxt in ("WP", "WDT") or i == 0 or prev in ("IN",)) else "CD"
            if low in PARTICLES and prev is not None and prev.startswith("VB"):
                tags[i] = "RP"
        # second pass: a word tagged as a verb right after a WH word that the
        # first pass did not catch (e.g. "who drives")
        for i in range(1, n):
            if tags[i - 1] in ("WDT", "WP") and tags[i] in NOUN_TAGS and self.verb_capable(tokens[i]):
                tags[i] = "VBZ" if tokens[i].lower().endswith("s") else "VBP"
        return tags


class Node:
    def __init__(self, label, children=None, word=None):
        self.label = label
        self.children = children or []
        self.word = word

    def render(self):
        if self.word is not None:
            return "(%s %s)" % (self.label, self.word)
        return "(%s %s)" % (self.label, " ".join(c.render() for c in self.children))


class Chunker:
    def __init__(self, words, tags):
        self.words = words
        self.tags = tags
        self.i = 0

    def peek(self, k=0):
        j = self.i + k
        return self.tags[j] if j < len(self.tags) else None

    def leaf(self):
        node = Node(self.tags[self.i], word=self.words[self.i])
        self.i += 1
        return node

    def np_start(self, k=0):
        t = self.peek(k)
        return t is not None and (t in DET_TAGS or t in NOUN_TAGS or t in ("JJ", "JJR", "JJS", "CD", "PRP")
                                  or (t == "RB" and self.peek(k + 1) in ("JJ",))
                                  or (t in ("VBN", "VBG") and self.peek(k + 1) in NOUN_TAGS))

    def parse_np_base(self):
        kids = []
        if self.peek() == "PRP":
            return Node("NP", [self.leaf()])
        if self.peek() in DET_TAGS or (self.peek() == "CD" and self.peek(1) in NOUN_TAGS | {"JJ"}):
            kids.append(self.leaf())
        while True:
            t = self.peek()
            if t is None:
                break
            if t == "RB" and self.peek(1) in ("JJ", "JJR", "JJS", "VBN"):
                adv = Node("ADVP", [self.leaf()])
                kids.append(Node("ADJP", [adv, self.leaf()]))
                continue
            if t in ("JJ", "JJR", "JJS", "VBN", "CD") and self.peek(1) == "CC" and \
                    self.peek(2) in ("JJ", "JJR", "JJS", "VBN"):
                a = self.leaf()
                c = self.leaf()
                b = self.leaf()
                kids.append(Node("ADJP", [a, c, b]))
                continue
            if t in PREMOD_TAGS and (self.peek(1) in NOUN_TAGS or self.peek(1) in PREMOD_TAGS
                                     or self.peek(1) == "RB"):
                kids.append(self.leaf())
                continue
            if t in NOUN_TAGS:
                kids.append(self.leaf())
                if self.peek() == "POS":
                    possessor = Node("NP", kids + [self.leaf()])
                    kids = [possessor]
                continue
            if t in ("JJ", "JJR", "JJS") and not any(k.label in NOUN_TAGS for k in kids):
                # adjective without a following noun: "the poor" style head
                kids.append(self.leaf())
                continue
            break
        if len(kids) == 1 and kids[0].label == "DT" and self.peek() in ("VBG", "VBN", "VB", "VBP"):
            self.tags[self.i] = "NN"
            kids.append(self.leaf())
        if not kids:
            return None
        if not any(k.label in NOUN_TAGS or k.label == "NP" for k in kids):
            if all(k.label in ("JJ", "JJR", "JJS", "ADJP", "RB") for k in kids):
                return Node("ADJP", kids) if len(kids) > 1 else Node("ADJP", kids)
        return Node("NP", kids)

    def parse_np(self):
        start = self.i
        base = self.parse_np_base()
        if base is None:
            self.i = start
            return None
        t = self.peek()
        post = None
        if t == "IN" or (t == "TO" and self.np_start(1)):
            post = self.parse_pp()
        elif t in ("WDT", "WP"):
            post = self.parse_sbar()
        elif t == "WP$" and self.peek(1) in NOUN_TAGS:
            post = self.parse_possessive_sbar()
        elif t in ("VBN", "VBG"):
            post = self.parse_vp()
        elif t == "TO" and self.peek(1) == "VB":
            post = self.parse_inf()
        node = Node("NP", [base, post]) if post is not None else base
        if self.peek() == "CC" and self.np_start(1):
            cc = self.leaf()
            other = self.parse_np()
            if other is not None:
                node = Node("NP", [node, cc, other])
            else:
                self.i -= 1
        return node

    def parse_pp(self):
        prep = self.leaf()
        if self.peek() == "VBG":
            vp = self.parse_vp()
            return Node("PP", [prep, Node("S", [vp])])
        if self.np_start():
            np = self.parse_np()
            if np is not None:
                return Node("PP", [prep, np])
        return Node("PP", [prep])

    def parse_sbar(self):
        wh = self.leaf()
        whnode = Node("WHNP", [wh]) if wh.label in ("WDT", "WP") else Node("WHADVP", [wh])
        vp = self.parse_vp()
        if vp is None:
            return Node("SBAR", [whnode])
        return Node("SBAR", [whnode, Node("S", [vp])])

    def parse_possessive_sbar(self):
        wh = self.leaf()
        noun = self.leaf()
        whnode = Node("WHNP", [wh, noun])
        vp = self.parse_vp()
        if vp is None:
            return Node("SBAR", [whnode])
        return Node("SBAR", [whnode, Node("S", [vp])])

    def parse_inf(self):
        to = self.leaf()
        vp = self.parse_vp()
        inner = [to] + ([vp] if vp is not None else [])
        return Node("S", [Node("VP", inner)])

    def parse_vp(self):
        kids = []
        while self.peek() in ("MD", "RB"):
            if self.peek() == "MD":
                kids.append(self.leaf())
            else:
                kids.append(Node("ADVP", [self.leaf()]))
        t = self.peek()
        if t is None or not t.startswith("VB"):
            return Node("VP", kids) if kids else None
        verb = self.leaf()
        # auxiliary followed by another verb form
        if verb.word.lower() in ("is", "are", "was", "were", "be", "been", "has", "have", "had") \
                and self.peek() is not None and self.peek() in ("VBN", "VBG"):
            inner = self.parse_vp()
            return Node("VP", kids + [verb, inner])
        kids.append(verb)
        while self.peek() == "CC" and self.peek(1) is not None and self.peek(1).startswith("VB"):
            kids.append(self.leaf())
            kids.append(self.leaf())
        if self.peek() == "RP":
            kids.append(Node("PRT", [self.leaf()]))
        while True:
            t = self.peek()
            if t is None:
                break
            if self.np_start():
                np = self.parse_np()
                if np is None:
                    break
                kids.append(np)
            elif t == "IN" or (t == "TO" and self.np_start(1)):
                kids.append(self.parse_pp())
            elif t == "TO" and self.peek(1) == "VB":
                kids.append(self.parse_inf())
            elif t in ("RB", "RBR"):
                kids.append(Node("ADVP", [self.leaf()]))
            elif t in ("WDT", "WP", "WRB"):
                kids.append(self.parse_sbar())
            elif t == "RP":
                kids.append(Node("PRT", [self.leaf()]))
            else:
                break
        return Node("VP", kids)

    def parse_any(self):
        t = self.peek()
        if t == "IN" or (t == "TO" and self.np_start(1)):
            return self.parse_pp()
        if t in ("WDT", "WP", "WRB"):
            return self.parse_sbar()
        if t == "TO":
            return self.parse_inf()
        if t is not None and (t.startswith("VB") or t == "MD"):
            vp = self.parse_vp()
            if vp is not None:
                return vp
        if self.np_start():
            np = self.parse_np()
            if np is not None:
                return np
        return self.leaf()


def chunk(words, tags, gloss_pos):
    c = Chunker(words, tags)
    parts = []
    if gloss_pos == "v" and tags and tags[0].startswith("VB"):
        main = c.parse_vp()
        parts.append(main)
        while c.i < len(words):
            parts.append(c.parse_any())
        vp = parts[0]
        vp.children.extend(parts[1:])
        return Node("ROOT", [Node("S", [vp])])
    while c.i < len(words):
        parts.append(c.parse_any())
    if len(parts) == 1:
        top = parts[0]
        if top.word is not None:
            top = Node("NP", [top])
    else:
        top = Node("NP" if parts[0].label in ("NP",) else "FRAG", parts)
    return Node("ROOT", [top])


def escape(word):
    return word.replace("(", "-LRB-").replace(")", "-RRB-")


def parse_definition(text, gloss_pos, tagger):
    """Returns (clean clause text, bracketed tree string) or None."""
    clause = clean_definition(text)
    words = tokenize(clause)
    if not words or len(words) > 40:
        return None
    tags = tagger.tag(words, gloss_pos)
    tree = chunk([escape(w) for w in words], tags, gloss_pos)
    return " ".join(words), tree.render()
