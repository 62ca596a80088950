"""Deterministic program corpora shared by the test suite.

The consistency corpus is exhaustive within documented structural bounds:
up to three atoms, at most two rules per atom, and rule bodies of at most two
literals (one-literal bodies only in the three-atom slice, which would
otherwise dwarf the runtime budget).  The game corpus is a smaller curated
set on which exhaustive strategy enumeration stays cheap."""

from __future__ import annotations

import itertools

NIKO = "a :- b.\na :- c.\nb :- a.\nc :- a.\n"
LEADING = "p :- not q.\nq :- not p.\np :- r.\n#open r.\n"


def _body_options(atoms: tuple[str, ...], max_len: int, with_fact: bool = True):
    literals = []
    for a in atoms:
        literals.append(a)
        literals.append("not " + a)
    options = []
    if with_fact:
        options.append(())
    for k in range(1, max_len + 1):
        options.extend(itertools.combinations(literals, k))
    return options


def _rule_sets(options, max_rules: int):
    sets = [()]
    for k in range(1, max_rules + 1):
        sets.extend(itertools.combinations(options, k))
    return sets


def _program_text(per_atom: dict[str, tuple]) -> str:
    lines = []
    for atom in sorted(per_atom):
        if not per_atom[atom]:
            lines.append(f"#defined {atom}.")
    for atom in sorted(per_atom):
        for body in per_atom[atom]:
            if body:
                lines.append(f"{atom} :- {', '.join(body)}.")
            else:
                lines.append(f"{atom}.")
    return "\n".join(lines) + "\n"


def one_atom_programs() -> list[str]:
    options = _body_options(("p",), 2)
    return [_program_text({"p": rs}) for rs in _rule_sets(options, 2)]


def _swap_atoms(text: str, a: str, b: str) -> str:
    return text.replace(a, "@").replace(b, a).replace("@", b)


def _canonical_key(text: str) -> str:
    def norm(t: str) -> str:
        return "\n".join(sorted(t.strip().splitlines()))

    return min(norm(text), norm(_swap_atoms(text, "p", "q")))


def two_atom_programs() -> list[str]:
    """All programs over {p, q} with <= 2 rules per atom and bodies of <= 2
    literals, deduplicated modulo swapping the two atom names."""
    options = _body_options(("p", "q"), 2)
    sets = _rule_sets(options, 2)
    out = []
    seen = set()
    for sp in sets:
        for sq in sets:
            text = _program_text({"p": sp, "q": sq})
            key = _canonical_key(text)
            if key in seen:
                continue
            seen.add(key)
            out.append(text)
    return out


def two_atom_open_programs() -> list[str]:
    """One defined atom over bodies that may mention an open atom."""
    options = _body_options(("p", "q"), 2)
    out = []
    for sp in _rule_sets(options, 2):
        if not sp:
            continue
        mentions_q = any(any("q" in lit for lit in body) for body in sp)
        if not mentions_q:
            continue
        out.append("#open q.\n" + _program_text({"p": sp}))
    return out


def three_atom_programs() -> list[str]:
    """Each of p, q, r gets exactly one single-literal rule."""
    literals = ["p", "q", "r", "not p", "not q", "not r"]
    out = []
    for bp, bq, br in itertools.product(literals, repeat=3):
        out.append(f"p :- {bp}.\nq :- {bq}.\nr :- {br}.\n")
    return out


def consistency_corpus() -> list[str]:
    return (
        [NIKO, LEADING]
        + one_atom_programs()
        + two_atom_programs()
        + two_atom_open_programs()
        + three_atom_programs()
    )


def game_corpus() -> list[str]:
    """Curated frames small enough for exhaustive strategy-pair search."""
    singles = _body_options(("p", "q"), 1)  # facts and one-literal bodies
    sets = _rule_sets(singles, 2)
    out = []
    seen = set()
    for sp in sets:
        for sq in sets:
            text = _program_text({"p": sp, "q": sq})
            key = _canonical_key(text)
            if key in seen:
                continue
            seen.add(key)
            out.append(text)
    out += [
        NIKO,
        LEADING,
        "p :- q, not q.\n#defined q.\n",
        "p :- p, q.\nq :- p.\n",
        "p :- not q, r.\nq :- not p.\n#open r.\n",
        "a :- b.\na :- not b.\nb :- a.\n",
        "a :- b, c.\nb :- a.\nc :- a.\n",
    ]
    return out


def oracle_corpus() -> list[str]:
    """At least twenty programs with at most four atoms each."""
    return [
        "p :- not q.\nq :- not p.\n",
        "a :- not a.\n",
        "a.\n",
        "p :- p.\n",
        "a :- b.\nb :- c.\nc.\n",
        "a :- not b.\nb :- not a.\nc.\n",
        "a :- not b.\nb :- not c.\nc :- not a.\n",
        "a :- b.\nb :- a.\n",
        NIKO,
        LEADING,
        "a :- b.\nb :- not c.\n#open c.\n",
        "p :- not q.\nq :- not p.\nr :- p.\n",
        "a :- a.\na :- not b.\nb :- b.\n",
        "p :- not q, not r.\nq :- not p.\nr :- not p.\n",
        "a.\nb :- not a.\n",
        "b :- not a.\n#open a.\n",
        "p :- q.\nq :- p.\nr :- not p.\n",
        "a :- b, c.\nb :- a.\nc :- a.\n",
        "s :- not t.\nt :- not s.\nu :- s.\nu :- t.\n",
        "w :- w.\nv :- not w.\n",
        "p :- o1, not o2.\n#open o1.\n#open o2.\n",
        "x :- not y.\ny :- x.\n",
    ]
