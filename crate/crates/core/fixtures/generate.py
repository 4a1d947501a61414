#!/usr/bin/env python3
"""Regenerates the desk-scale fixture corpora.

Sentences come from a small Spanish phrase grammar with topic-coherent
vocabulary, so each token carries its gold EAGLES tag. Output is fully
determined by SEED.

    python3 generate.py            # writes into the directory of this file
"""

import os
import random

SEED = 20190417
HERE = os.path.dirname(os.path.abspath(__file__))

N_8KF = 800
N_5KL = 6000

# --- vocabulary -------------------------------------------------------------

# (singular, plural, gender) ; gender M/F/C
TOPICS = {
    "realeza": {
        "nouns": [
            ("rey", "reyes", "M"), ("príncipe", "príncipes", "M"), ("castillo", "castillos", "M"),
            ("trono", "tronos", "M"), ("palacio", "palacios", "M"), ("cetro", "cetros", "M"),
            ("caballero", "caballeros", "M"), ("reino", "reinos", "M"),
            ("reina", "reinas", "F"), ("princesa", "princesas", "F"), ("corona", "coronas", "F"),
            ("corte", "cortes", "F"), ("torre", "torres", "F"), ("dinastía", "dinastías", "F"),
        ],
        "adjs": ["real", "noble", "soberbio", "antiguo", "majestuoso"],
        "verbs": ["reinar", "gobernar", "coronar", "heredar", "ordenar"],
    },
    "mar": {
        "nouns": [
            ("mar", "mares", "M"), ("barco", "barcos", "M"), ("puerto", "puertos", "M"),
            ("marinero", "marineros", "M"), ("viento", "vientos", "M"), ("faro", "faros", "M"),
            ("pez", "peces", "M"),
            ("ola", "olas", "F"), ("playa", "playas", "F"), ("arena", "arenas", "F"),
            ("orilla", "orillas", "F"), ("sirena", "sirenas", "F"), ("marea", "mareas", "F"),
        ],
        "adjs": ["salado", "azul", "profundo", "inmenso", "sereno"],
        "verbs": ["navegar", "naufragar", "flotar", "hundir", "zarpar"],
    },
    "amor": {
        "nouns": [
            ("amor", "amores", "M"), ("corazón", "corazones", "M"), ("beso", "besos", "M"),
            ("deseo", "deseos", "M"), ("abrazo", "abrazos", "M"), ("suspiro", "suspiros", "M"),
            ("amante", "amantes", "C"),
            ("pasión", "pasiones", "F"), ("caricia", "caricias", "F"), ("ternura", "ternuras", "F"),
            ("promesa", "promesas", "F"), ("mirada", "miradas", "F"), ("boca", "bocas", "F"),
        ],
        "adjs": ["tierno", "dulce", "apasionado", "eterno", "ardiente"],
        "verbs": ["amar", "besar", "desear", "soñar", "suspirar"],
    },
    "guerra": {
        "nouns": [
            ("soldado", "soldados", "M"), ("combate", "combates", "M"), ("escudo", "escudos", "M"),
            ("enemigo", "enemigos", "M"), ("ejército", "ejércitos", "M"), ("cañón", "cañones", "M"),
            ("guerrero", "guerreros", "M"),
            ("guerra", "guerras", "F"), ("espada", "espadas", "F"), ("batalla", "batallas", "F"),
            ("sangre", "sangres", "F"), ("lanza", "lanzas", "F"), ("muerte", "muertes", "F"),
            ("victoria", "victorias", "F"),
        ],
        "adjs": ["cruel", "feroz", "valiente", "sangriento", "herido"],
        "verbs": ["luchar", "matar", "vencer", "atacar", "combatir"],
    },
    "casa": {
        "nouns": [
            ("hogar", "hogares", "M"), ("techo", "techos", "M"), ("jardín", "jardines", "M"),
            ("pan", "panes", "M"), ("fuego", "fuegos", "M"), ("libro", "libros", "M"),
            ("mesa", "mesas", "F"), ("silla", "sillas", "F"), ("puerta", "puertas", "F"),
            ("ventana", "ventanas", "F"), ("cocina", "cocinas", "F"), ("lámpara", "lámparas", "F"),
            ("cama", "camas", "F"),
        ],
        "adjs": ["viejo", "limpio", "cálido", "pequeño", "abierto"],
        "verbs": ["cocinar", "limpiar", "abrir", "cerrar", "habitar"],
    },
    "cielo": {
        "nouns": [
            ("sol", "soles", "M"), ("cielo", "cielos", "M"), ("astro", "astros", "M"),
            ("lucero", "luceros", "M"), ("horizonte", "horizontes", "M"), ("amanecer", "amaneceres", "M"),
            ("luna", "lunas", "F"), ("estrella", "estrellas", "F"), ("nube", "nubes", "F"),
            ("noche", "noches", "F"), ("luz", "luces", "F"), ("aurora", "auroras", "F"),
        ],
        "adjs": ["brillante", "oscuro", "lejano", "luminoso", "plateado"],
        "verbs": ["brillar", "iluminar", "amanecer", "girar", "resplandecer"],
    },
}

# Gendered human nouns: lemma is the masculine singular.
PEOPLE = [
    ("profesor", "profesora", "profesores", "profesoras"),
    ("niño", "niña", "niños", "niñas"),
    ("hermano", "hermana", "hermanos", "hermanas"),
    ("viajero", "viajera", "viajeros", "viajeras"),
    ("poeta", "poetisa", "poetas", "poetisas"),
]

STEM_CHANGE = {
    "gobernar": ("gobiern", "gobern"),
    "soñar": ("sueñ", "soñ"),
    "cerrar": ("cierr", "cerr"),
}

ADJ_COMMON_PLURAL = {"real": "reales", "noble": "nobles", "azul": "azules", "dulce": "dulces",
                     "ardiente": "ardientes", "cruel": "crueles", "feroz": "feroces",
                     "valiente": "valientes", "brillante": "brillantes"}


def verb_forms(inf):
    """(surface, tag) pairs for the nine forms the grammar uses."""
    stem, ending = inf[:-2], inf[-2:]
    pres_s = pres_p = stem
    if inf in STEM_CHANGE:
        pres_s = pres_p = STEM_CHANGE[inf][0]
    if ending == "ar":
        return [
            (pres_s + "a", "VMIP3S0"), (pres_p + "an", "VMIP3P0"),
            (stem + "aba", "VMII3S0"), (stem + "aban", "VMII3P0"),
            (stem + "ó", "VMIS3S0"), (stem + "aron", "VMIS3P0"),
            (inf, "VMN0000"), (stem + "ando", "VMG0000"), (stem + "ado", "VMP00SM"),
        ]
    participle = "abierto" if inf == "abrir" else stem + "ido"
    return [
        (pres_s + "e", "VMIP3S0"), (pres_p + "en", "VMIP3P0"),
        (stem + "ía", "VMII3S0"), (stem + "ían", "VMII3P0"),
        (stem + "ió", "VMIS3S0"), (stem + "ieron", "VMIS3P0"),
        (inf, "VMN0000"), (stem + "iendo", "VMG0000"), (participle, "VMP00SM"),
    ]


def adj_forms(lemma):
    if lemma.endswith("o"):
        b = lemma[:-1]
        return {("M", "S"): (lemma, "AQ0MS00"), ("F", "S"): (b + "a", "AQ0FS00"),
                ("M", "P"): (b + "os", "AQ0MP00"), ("F", "P"): (b + "as", "AQ0FP00")}
    pl = ADJ_COMMON_PLURAL[lemma]
    return {("M", "S"): (lemma, "AQ0CS00"), ("F", "S"): (lemma, "AQ0CS00"),
            ("M", "P"): (pl, "AQ0CP00"), ("F", "P"): (pl, "AQ0CP00")}


def noun_tag(gender, number):
    return "NC%s%s000" % (gender, number)


DETS = {
    # (gender, number) -> [(surface, tag)]
    ("M", "S"): [("el", "DA0MS0"), ("un", "DI0MS0"), ("su", "DP3CS0"), ("este", "DD0MS0"), ("aquel", "DD0MS0")],
    ("F", "S"): [("la", "DA0FS0"), ("una", "DI0FS0"), ("su", "DP3CS0"), ("esta", "DD0FS0"), ("aquella", "DD0FS0")],
    ("M", "P"): [("los", "DA0MP0"), ("unos", "DI0MP0"), ("sus", "DP3CP0"), ("estos", "DD0MP0")],
    ("F", "P"): [("las", "DA0FP0"), ("unas", "DI0FP0"), ("sus", "DP3CP0"), ("estas", "DD0FP0")],
}
PREPS = [("de", "SPS00"), ("en", "SPS00"), ("con", "SPS00"), ("sin", "SPS00"), ("sobre", "SPS00"),
         ("bajo", "SPS00"), ("hacia", "SPS00"), ("entre", "SPS00"), ("por", "SPS00"), ("para", "SPS00"),
         ("a", "SPS00")]
ADVS = [("siempre", "RG"), ("nunca", "RG"), ("ya", "RG"), ("también", "RG"), ("lentamente", "RG"),
        ("hoy", "RG"), ("aún", "RG")]
COORD = [("y", "CC"), ("o", "CC"), ("pero", "CC")]
SUBORD = [("cuando", "CS"), ("porque", "CS"), ("si", "CS"), ("mientras", "CS")]


class Gen:
    def __init__(self, rng):
        self.rng = rng
        self.nouns = {}
        for topic, v in TOPICS.items():
            self.nouns[topic] = [(s, p, g, s) for (s, p, g) in v["nouns"]]

    def topic_pick(self, topic):
        # Mostly on-topic vocabulary, occasionally drift to another topic.
        if self.rng.random() < 0.12:
            return self.rng.choice(sorted(TOPICS))
        return topic

    def np(self, topic, number=None, person=False, adj_p=0.35, allow_contract=None):
        r = self.rng
        number = number or ("S" if r.random() < 0.7 else "P")
        if person and r.random() < 0.5:
            row = r.choice(PEOPLE)
            gender = r.choice("MF")
            idx = {("M", "S"): 0, ("F", "S"): 1, ("M", "P"): 2, ("F", "P"): 3}[(gender, number)]
            surface = row[idx]
            tag = noun_tag(gender, number)
            if row[0] == "poeta" and gender == "M":
                tag = noun_tag("C", number)
        else:
            t = self.topic_pick(topic)
            s, p, g, _ = r.choice(self.nouns[t])
            surface = s if number == "S" else p
            tag = noun_tag(g, number)
            gender = g if g != "C" else r.choice("MF")
        det = r.choice(DETS[(gender, number)])
        toks = [det, (surface, tag)]
        if r.random() < adj_p:
            a = r.choice(TOPICS[self.topic_pick(topic)]["adjs"])
            toks.append(adj_forms(a)[(gender, number)])
        return toks, number

    def verb(self, topic, number, kind="fin"):
        r = self.rng
        v = r.choice(TOPICS[self.topic_pick(topic)]["verbs"])
        forms = dict((t, s) for s, t in verb_forms(v))
        if kind == "inf":
            return (forms["VMN0000"], "VMN0000")
        if kind == "ger":
            return (forms["VMG0000"], "VMG0000")
        tense = r.choice(["IP", "IP", "II", "IS"])
        tag = "VMI%s3%s0" % (tense[1], number)
        return (forms[tag], tag)

    def pp(self, topic):
        prep = self.rng.choice(PREPS)
        np, _ = self.np(topic)
        if prep[0] in ("de", "a") and np[0][0] == "el":
            contracted = ("del", "SPCMS") if prep[0] == "de" else ("al", "SPCMS")
            return [contracted] + np[1:]
        return [prep] + np

    def sentence(self):
        r = self.rng
        topic = r.choice(sorted(TOPICS))
        pat = r.randrange(12)
        out = []
        if pat == 0:
            s, n = self.np(topic, person=True)
            o, _ = self.np(topic)
            out = s + [self.verb(topic, n)] + o
        elif pat == 1:
            s, n = self.np(topic, person=True)
            out = s + [self.verb(topic, n)] + self.pp(topic)
        elif pat == 2:
            s, n = self.np(topic, adj_p=1.0)
            out = s + [self.verb(topic, n), r.choice(ADVS)]
        elif pat == 3:
            s, n = self.np(topic)
            o, _ = self.np(topic)
            out = self.pp(topic) + [(",", "Fc")] + s + [self.verb(topic, n)] + o
        elif pat == 4:
            s, n = self.np(topic)
            s2, n2 = self.np(topic, person=True)
            out = s + [self.verb(topic, n), (",", "Fc"), r.choice(COORD)] + s2 + [self.verb(topic, n2)] + self.pp(topic)
        elif pat == 5:
            s, n = self.np(topic)
            o, _ = self.np(topic)
            out = s + [("que", "PR0CN000"), self.verb(topic, n)] + o + [self.verb(topic, n)] + self.pp(topic)
        elif pat == 6:
            s, n = self.np(topic, person=True)
            o, _ = self.np(topic)
            out = s + [("no", "RN"), self.verb(topic, n)] + o
        elif pat == 7:
            s, _ = self.np(topic, number="S")
            s2, _ = self.np(topic, number="S")
            out = s + [("y", "CC")] + s2 + [self.verb(topic, "P")] + self.pp(topic)
        elif pat == 8:
            s, n = self.np(topic, person=True)
            out = s + [self.verb(topic, n), self.verb(topic, n, "inf")] + self.pp(topic)
        elif pat == 9:
            s, n = self.np(topic)
            s2, n2 = self.np(topic)
            o, _ = self.np(topic)
            out = [r.choice(SUBORD)] + s + [self.verb(topic, n), (",", "Fc")] + s2 + [self.verb(topic, n2)] + o
        elif pat == 10:
            s, n = self.np(topic)
            out = s + [self.verb(topic, n), self.verb(topic, n, "ger")] + self.pp(topic)
        else:
            s, n = self.np(topic, adj_p=0.8)
            o, _ = self.np(topic, adj_p=0.8)
            s2, n2 = self.np(topic)
            o2, _ = self.np(topic)
            out = s + [self.verb(topic, n)] + o + [(",", "Fc"), ("pero", "CC")] + s2 + [("también", "RG"), self.verb(topic, n2)] + o2
        out.append((".", "Fp") if r.random() < 0.9 else (";", "Fx"))
        return out


def detok(tokens):
    text = ""
    for i, (w, _) in enumerate(tokens):
        if i == 0:
            w = w[0].upper() + w[1:]
            text = w
        elif w in (",", ".", ";"):
            text += w
        else:
            text += " " + w
    return text


def gen_unique(gen, n, seen):
    out = []
    while len(out) < n:
        s = gen.sentence()
        key = detok(s)
        if key in seen:
            continue
        seen.add(key)
        out.append(s)
    return out


def capitalized_first(s):
    w, t = s[0]
    return [(w[0].upper() + w[1:], t)] + s[1:]


def main():
    rng = random.Random(SEED)
    gen = Gen(rng)
    seen = set()
    kf = gen_unique(gen, N_8KF, seen)
    kl = gen_unique(gen, N_5KL, seen)

    with open(os.path.join(HERE, "tagged.tsv"), "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join("\n".join("%s\t%s" % tok for tok in capitalized_first(s)) + "\n" for s in kf))
    with open(os.path.join(HERE, "8kf-sample.txt"), "w", encoding="utf-8", newline="\n") as f:
        f.write("".join(detok(s) + "\n" for s in kf))
    with open(os.path.join(HERE, "5kl-sample.txt"), "w", encoding="utf-8", newline="\n") as f:
        f.write("".join(detok(s) + "\n" for s in kl))

    # tagger lexicon: lowercase surface, tag, frequency over both corpora
    counts = {}
    for s in kf + kl:
        for w, t in s:
            counts[(w.lower(), t)] = counts.get((w.lower(), t), 0) + 1
    with open(os.path.join(HERE, "lexicon.tsv"), "w", encoding="utf-8", newline="\n") as f:
        for (w, t), c in sorted(counts.items()):
            f.write("%s\t%s\t%d\n" % (w, t, c))

    # forms lexicon for every content lemma
    forms = []
    for topic in sorted(TOPICS):
        v = TOPICS[topic]
        for s, p, g in v["nouns"]:
            forms.append((s, s, noun_tag(g, "S")))
            forms.append((s, p, noun_tag(g, "P")))
        for a in v["adjs"]:
            seen_f = set()
            for _, (surface, tag) in sorted(adj_forms(a).items()):
                if (surface, tag) not in seen_f:
                    seen_f.add((surface, tag))
                    forms.append((a, surface, tag))
        for verb in v["verbs"]:
            for surface, tag in verb_forms(verb):
                forms.append((verb, surface, tag))
    for ms, fs, mp, fp in PEOPLE:
        g = "C" if ms == "poeta" else "M"
        forms += [(ms, ms, noun_tag(g, "S")), (ms, fs, noun_tag("F", "S")),
                  (ms, mp, noun_tag(g, "P")), (ms, fp, noun_tag("F", "P"))]
    with open(os.path.join(HERE, "forms.tsv"), "w", encoding="utf-8", newline="\n") as f:
        for lemma, surface, tag in forms:
            f.write("%s\t%s\t%s\t%d\n" % (lemma, surface, tag, max(1, counts.get((surface, tag), 0))))


if __name__ == "__main__":
    main()
