"""Writes the hand-authored mini WordNet used by unit and acceptance tests.

Usage: python3 tools/make_mini_wordnet.py fixtures/mini/wordnet
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import wnfile  # noqa: E402

# name: (pos, lex_filenum, [lemmas], [hypernyms], [instance hypernyms], gloss)
NOUNS = [
    ("entity", 3, ["entity"], [], [], "that which is perceived or known to exist"),
    ("object", 3, ["object", "physical_object"], ["entity"], [], "a tangible and visible entity"),
    ("animal", 5, ["animal", "beast"], ["object"], [], 'a living organism that moves voluntarily; "animals eat food"'),
    ("dog", 5, ["dog", "domestic_dog"], ["animal"], [],
     'a member of the genus Canis that has been domesticated by man; "the dog barked all night"'),
    ("puppy", 5, ["puppy"], ["dog"], [], "a young dog"),
    ("hound", 5, ["hound"], ["dog"], [], "any of several breeds of dog used for hunting"),
    ("cat", 5, ["cat", "true_cat"], ["animal"], [], "feline mammal usually having thick soft fur"),
    ("kitten", 5, ["kitten", "kitty"], ["cat"], [], 'young domestic cat; "the kitten chased the yarn"'),
    ("wolf", 5, ["wolf"], ["animal"], [], "any of various predatory carnivorous canine mammals"),
    ("plant", 20, ["plant", "flora"], ["object"], [], "a living organism lacking the power of locomotion"),
    ("tree", 20, ["tree"], ["plant"], [], "a tall perennial woody plant having a main trunk"),
    ("oak", 20, ["oak", "oak_tree"], ["tree"], [], "a deciduous tree of the genus Quercus"),
    ("pine", 20, ["pine", "pine_tree"], ["tree"], [], "a coniferous tree"),
    ("flower", 20, ["flower"], ["plant"], [], "a plant cultivated for its blooms"),
    ("artifact", 6, ["artifact", "artefact"], ["object"], [], "a man-made object"),
    ("vehicle", 6, ["vehicle"], ["artifact"], [], "a conveyance that transports people or objects"),
    ("car", 6, ["car", "auto", "automobile"], ["vehicle"], [],
     'a motor vehicle with four wheels; "he needs a car to get to work"'),
    ("taxi", 6, ["taxi", "cab", "taxicab"], ["car"], [], "a car driven by a person whose job is to take passengers"),
    ("bicycle", 6, ["bicycle", "bike"], ["vehicle"], [], "a wheeled vehicle that has two wheels"),
    ("tool", 6, ["tool"], ["artifact"], [], "an implement used in the practice of a vocation"),
    ("hammer", 6, ["hammer"], ["tool"], [], "a hand tool with a heavy rigid head and a handle"),
    ("person", 18, ["person", "individual", "someone"], ["object"], [], "a human being"),
    ("driver", 18, ["driver"], ["person"], [], "the operator of a motor vehicle"),
    ("worker", 18, ["worker"], ["person"], [], "a person who works at a specific occupation"),
    ("taxi_driver", 18, ["taxi_driver", "cabman", "cabby"], ["driver"], [],
     "someone who drives a taxi for a living"),
    ("chauffeur", 18, ["chauffeur"], ["driver", "worker"], [],
     "a man paid to drive a privately owned car"),
    ("frump", 18, ["frump", "dog"], ["person"], [], "a dull unattractive unpleasant girl or woman"),
    ("rex", 5, ["Rex"], [], ["dog"], "a dog of legend"),
    ("abstraction", 3, ["abstraction"], ["entity"], [], "a general concept formed by extracting common features"),
    ("feeling", 12, ["feeling"], ["abstraction"], [], "the experiencing of affective and emotional states"),
    ("sadness", 12, ["sadness", "unhappiness"], ["feeling"], [], "emotions experienced when not in a state of well-being"),
    ("cheerlessness", 12, ["cheerlessness", "uncheerfulness"], ["sadness"], [],
     "a feeling of dreary or pessimistic sadness"),
    ("depression", 12, ["depression"], ["sadness"], [], "a feeling of melancholy apprehension"),
    ("happiness", 12, ["happiness", "felicity"], ["feeling"], [], "emotions experienced when in a state of well-being"),
    ("attribute", 7, ["attribute"], ["abstraction"], [], "an abstraction belonging to an entity"),
    ("quality", 7, ["quality"], ["attribute"], [], "an essential and distinguishing attribute of something"),
]

VERBS = [
    ("change", 30, ["change"], [], "cause to change; make different"),
    ("remove", 30, ["remove", "take", "take_away"], ["change"], 'remove something concrete; "remove the dishes"'),
    ("deforest", 30, ["deforest", "disforest"], ["remove"], "remove the trees from"),
    ("detoxify", 30, ["detoxify", "detoxicate"], ["remove"], "remove poison from"),
    ("clean", 30, ["clean", "make_clean"], ["change"], "make clean by removing dirt"),
    ("move", 38, ["move", "travel"], [], "change location; move, travel, or proceed"),
    ("go", 38, ["go", "locomote"], ["move"], "move or proceed somewhere"),
    ("drive", 38, ["drive"], ["go"], 'travel or be transported in a vehicle; "we drove to the city"'),
    ("walk", 38, ["walk"], ["go"], "use one's feet to advance"),
    ("run", 38, ["run"], ["go"], "move fast by using one's feet"),
]

ADJS = [
    ("sad", 0, "a", ["sad"], "experiencing or showing sorrow"),
    ("happy", 0, "a", ["happy(a)"], "enjoying or showing joy"),
    ("glad", 0, "s", ["glad"], "showing or causing joy"),
]

ADVS = [
    ("quickly", 2, ["quickly", "rapidly"], 'with rapid movements; "he works quickly"'),
]


def build():
    synsets = {}
    ids = {}
    counter = [0]

    def key_for(pos, name):
        if (pos, name) not in ids:
            counter[0] += 1
            ids[(pos, name)] = (pos, counter[0])
        return ids[(pos, name)]

    for name, lex, lemmas, hyper, inst, gloss in NOUNS:
        k = key_for("n", name)
        ptrs = [("@", key_for("n", h), "0000") for h in hyper]
        ptrs += [("@i", key_for("n", h), "0000") for h in inst]
        synsets[k] = wnfile.Synset(k, lex, "n", [(l, 0) for l in lemmas], ptrs, "", gloss)
    for name, lex, lemmas, hyper, gloss in VERBS:
        k = key_for("v", name)
        ptrs = [("@", key_for("v", h), "0000") for h in hyper]
        synsets[k] = wnfile.Synset(k, lex, "v", [(l, 0) for l in lemmas], ptrs, "01 + 02 00", gloss)
    for name, lex, ss_type, lemmas, gloss in ADJS:
        k = key_for("a", name)
        synsets[k] = wnfile.Synset(k, lex, ss_type, [(l, 0) for l in lemmas], [], "", gloss)
    for name, lex, lemmas, gloss in ADVS:
        k = key_for("r", name)
        synsets[k] = wnfile.Synset(k, lex, "r", [(l, 0) for l in lemmas], [], "", gloss)

    # mirror hypernym pointers as hyponym pointers
    for k, s in list(synsets.items()):
        for sym, target, st in list(s.pointers):
            inverse = {"@": "~", "@i": "~i"}[sym]
            synsets[target].pointers.append((inverse, k, st))
    for s in synsets.values():
        s.pointers.sort(key=lambda p: (p[0], p[1]))

    # "dog" the animal is the first sense, "dog" the frump the second
    wnfile.set_sense_order({("n", "dog"): [ids[("n", "dog")], ids[("n", "frump")]]})
    return synsets


def main():
    out = sys.argv[1]
    synsets = build()
    wnfile.write_wordnet(out, synsets)
    with open(os.path.join(out, "LICENSE"), "w", encoding="utf-8") as f:
        f.write(wnfile.LICENSE_HEADER)
    print("nouns=%d verbs=%d adjs=%d advs=%d" % (
        len(NOUNS), len(VERBS), len(ADJS), len(ADVS)))


if __name__ == "__main__":
    main()
