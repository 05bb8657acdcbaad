#!/usr/bin/env python3
"""Regenerate crates/core/data/pool.txt, the bundled sentence pool used by the
corpus simulator.

The sentences are synthetic encyclopedia-style statements built from small
word lists and generated proper names, so the file carries no third-party text.
Output is deterministic for a given --seed.
"""

import argparse
import random

NOUNS = """
river valley mountain village city harbor castle bridge railway station cathedral
museum library university college school hospital factory mill mine quarry forest
lake island peninsula coast desert plain plateau glacier volcano canyon marsh
meadow garden park palace fortress tower temple monastery abbey chapel church
market square street road highway canal tunnel dam reservoir lighthouse airport
festival election treaty war battle siege revolution dynasty empire kingdom republic
province district county parish municipality region territory colony settlement
tribe clan family council parliament assembly court senate ministry agency
company corporation bank guild union league federation association society
orchestra choir band opera ballet theatre film novel poem play painting sculpture
manuscript chronicle journal newspaper magazine album song symphony concerto
species genus family order mammal bird reptile amphibian insect fish plant tree
flower fungus moss fern grass shrub vine algae bacterium virus protein enzyme
gene cell tissue organ bone muscle nerve brain heart liver kidney lung
engine motor turbine reactor furnace boiler pump valve piston gear wheel axle
ship vessel frigate steamer submarine aircraft glider locomotive carriage tram
bicycle rocket satellite telescope microscope compass clock lens prism magnet
mineral crystal metal alloy copper iron silver gold tin lead zinc nickel cobalt
granite marble limestone sandstone basalt clay salt coal oil gas timber wool cotton
silk grain wheat barley rice maize potato olive grape wine beer cheese bread
dialect language alphabet script grammar vocabulary poet painter composer architect
engineer physicist chemist biologist botanist astronomer mathematician historian
philosopher theologian bishop abbot monk priest king queen prince duke count baron
merchant farmer sailor soldier general admiral captain governor mayor senator judge
""".split()

ADJECTIVES = """
ancient medieval modern northern southern eastern western central coastal rural
urban remote small large major minor historic famous notable prominent influential
wealthy poor fertile arid humid tropical temperate alpine volcanic marine freshwater
endemic rare common extinct native wild domestic royal imperial colonial civic
religious secular military naval commercial industrial agricultural academic public
private independent autonomous federal municipal regional national international
early late first second third final principal original restored ruined fortified
elaborate modest ornate simple gothic baroque romanesque classical neoclassical
wooden stone brick iron steel glass narrow wide deep shallow steep gentle
""".split()

VERBS = """
founded built established designed constructed restored expanded rebuilt destroyed
abandoned acquired sold inherited granted occupied captured defended besieged
discovered described named classified recorded documented published translated
composed performed premiered exhibited painted carved cast forged mined quarried
cultivated harvested exported imported traded produced manufactured assembled
governed ruled administered represented elected appointed succeeded replaced
studied taught trained surveyed mapped explored crossed navigated connected served
""".split()

PREPS = "near beside along across beyond within around below above behind".split()
CONNECT = """however meanwhile subsequently consequently nevertheless later initially
eventually afterwards traditionally""".split()
ROLES = """capital seat centre hub terminus gateway stronghold residence headquarters
birthplace""".split()

ONSETS = ["b", "br", "c", "ch", "d", "dr", "f", "g", "gr", "h", "k", "kl", "l", "m",
          "n", "p", "pr", "r", "s", "st", "t", "tr", "v", "w", "z", "th", "sh"]
VOWELS = ["a", "e", "i", "o", "u", "ae", "ei", "ou", "ia", "io"]
CODAS = ["", "", "n", "r", "l", "s", "th", "nd", "rk", "m", "x", "ck"]
SUFFIXES = ["ia", "burg", "ford", "ton", "heim", "ovo", "ara", "esh", "wick", "dale",
            "mont", "stad", "iya", "enne", "ouk"]


def name(rng, syllables=None):
    n = syllables or rng.randint(2, 3)
    parts = []
    for _ in range(n):
        parts.append(rng.choice(ONSETS) + rng.choice(VOWELS) + rng.choice(CODAS))
    base = "".join(parts)
    if rng.random() < 0.4:
        base += rng.choice(SUFFIXES)
    return base.capitalize()


def article(word):
    return "an" if word[0] in "aeiou" else "a"


def make_sentence(rng, places, people):
    place = rng.choice(places)
    other = rng.choice(places)
    person = rng.choice(people)
    person2 = rng.choice(people)
    n1, n2, n3 = rng.choice(NOUNS), rng.choice(NOUNS), rng.choice(NOUNS)
    a1, a2 = rng.choice(ADJECTIVES), rng.choice(ADJECTIVES)
    v1, v2 = rng.choice(VERBS), rng.choice(VERBS)
    year = rng.randint(1050, 1995)
    year2 = year + rng.randint(3, 120)
    count = rng.randint(2, 9000)
    templates = [
        f"{place} is {article(a1)} {a1} {n1} located {rng.choice(PREPS)} the {a2} {n2} of {other}.",
        f"The {n1} was {v1} in {year} by {person} and later {v2} by {person2} in {year2}.",
        f"In {year} the {a1} {n1} of {place} was {v1} after a long dispute with the {n2} of {other}.",
        f"{person} was {article(a1)} {a1} {n1} who {v1} the {n2} of {place} during the {a2} period.",
        f"{rng.choice(CONNECT).capitalize()}, the {n1} {v1} {count} {n2}s from {other} to the {a1} {n3} of {place}.",
        f"The {a1} {n1} of {place} served as the {rng.choice(ROLES)} of the {a2} {n2} until {year}.",
        f"According to {person}, the {n1} {v1} {rng.choice(PREPS)} the {n2} was among the oldest in {other}.",
        f"By {year2} the population of {place} had grown to {count} and the {n1} had been {v1}.",
        f"The {n1} is known for its {a1} {n2}, which was {v1} by {person} around {year}.",
        f"Several {a1} {n1}s were {v1} {rng.choice(PREPS)} {place}, although most were {v2} before {year2}.",
        f"{person} and {person2} {v1} the first {a1} {n1} in {place} with support from the {n2} of {other}.",
        f"The {a1} {n1} connects {place} with {other} and carries about {count} {n2}s each year.",
        f"Records from {year} describe the {n1} as {article(a1)} {a1} {n2} with {article(a2)} {a2} {n3}.",
        f"After the {n1} of {year}, the {a1} {n2} was {v1} and its {n3} {v2} to {other}.",
        f"The {n1} of {place} is {article(a1)} {a1} example of {a2} {n2} in the {n3} of {other}.",
    ]
    return rng.choice(templates)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=2017)
    ap.add_argument("--sentences", type=int, default=3000)
    ap.add_argument("--out", default="crates/core/data/pool.txt")
    args = ap.parse_args()
    rng = random.Random(args.seed)
    places = sorted({name(rng) for _ in range(900)})
    people = sorted({f"{name(rng, 2)} {name(rng)}" for _ in range(700)})
    seen = set()
    lines = []
    while len(lines) < args.sentences:
        s = make_sentence(rng, places, people)
        if s not in seen:
            seen.add(s)
            lines.append(s)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
