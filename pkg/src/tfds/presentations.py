"""Free-group words, finite presentations, homomorphisms and Fox calculus.

Generators are referred to by position; a :class:`Word` is a tuple of
syllables ``(generator_index, exponent)`` kept freely reduced.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence


class PresentationError(ValueError):
    """Raised for malformed presentation or map text."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


def free_reduce(letters: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out: list[tuple[int, int]] = []
    for gen, exp in letters:
        if exp == 0:
            continue
        if out and out[-1][0] == gen:
            merged = out[-1][1] + exp
            if merged:
                out[-1] = (gen, merged)
            else:
                out.pop()
        else:
            out.append((gen, exp))
    return tuple(out)


class Word:
    """A freely reduced word in the free group on numbered generators."""

    __slots__ = ("letters", "_hash")

    def __init__(self, letters: Iterable[tuple[int, int]] = ()):
        self.letters = free_reduce((int(g), int(e)) for g, e in letters)
        self._hash = hash(self.letters)

    @classmethod
    def gen(cls, i: int, exp: int = 1) -> "Word":
        return cls(((i, exp),))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word((g, -e) for g, e in reversed(self.letters))

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        return Word(self.letters * n)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __lt__(self, other: "Word"):
        return (len(self), self.letters) < (len(other), other.letters)

    def __hash__(self):
        return self._hash

    def __len__(self):
        return sum(abs(e) for _, e in self.letters)

    def __bool__(self):
        return bool(self.letters)

    def __repr__(self):
        return f"Word({list(self.letters)!r})"

    def unit_letters(self) -> list[tuple[int, int]]:
        """Expand syllables into letters with exponent +1 or -1."""
        out = []
        for g, e in self.letters:
            s = 1 if e > 0 else -1
            out.extend([(g, s)] * abs(e))
        return out

    def generators(self) -> set[int]:
        return {g for g, _ in self.letters}

    def exponent_sums(self, ngens: int) -> list[int]:
        v = [0] * ngens
        for g, e in self.letters:
            v[g] += e
        return v

    def cyclically_reduced(self) -> "Word":
        letters = list(self.letters)
        while len(letters) >= 2 and letters[0][0] == letters[-1][0] and (letters[0][1] > 0) != (letters[-1][1] > 0):
            (g, a), (_, b) = letters[0], letters[-1]
            cut = min(abs(a), abs(b))
            a -= cut if a > 0 else -cut
            b -= cut if b > 0 else -cut
            letters = letters[1:-1]
            if a:
                letters.insert(0, (g, a))
            if b:
                letters.append((g, b))
        if len(letters) == 1:
            return Word(letters)
        return Word(letters)

    def format(self, names: Sequence[str]) -> str:
        if not self.letters:
            return "1"
        parts = []
        for g, e in self.letters:
            parts.append(names[g] if e == 1 else f"{names[g]}^{e}")
        return " ".join(parts)


IDENTITY = Word()


def word_product(ws: Iterable[Word]) -> Word:
    letters: list[tuple[int, int]] = []
    for w in ws:
        letters.extend(w.letters)
    return Word(letters)


class FreeRingElt:
    """Element of the rational group ring of a free group."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Word, Fraction] | None = None):
        self.terms = {w: Fraction(c) for w, c in (terms or {}).items() if c}

    @classmethod
    def from_word(cls, w: Word, coef=1) -> "FreeRingElt":
        return cls({w: Fraction(coef)})

    @classmethod
    def one(cls) -> "FreeRingElt":
        return cls({IDENTITY: Fraction(1)})

    def __add__(self, other: "FreeRingElt") -> "FreeRingElt":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return FreeRingElt(out)

    def __neg__(self):
        return FreeRingElt({w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "FreeRingElt") -> "FreeRingElt":
        return self + (-other)

    def __mul__(self, other: "FreeRingElt") -> "FreeRingElt":
        out: dict[Word, Fraction] = {}
        for u, a in self.terms.items():
            for v, b in other.terms.items():
                w = u * v
                out[w] = out.get(w, 0) + a * b
        return FreeRingElt(out)

    def __eq__(self, other):
        return isinstance(other, FreeRingElt) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        items = sorted(self.terms.items(), key=lambda kv: kv[0])
        return "FreeRingElt(" + ", ".join(f"{c}*{w.letters}" for w, c in items) + ")"

    def augmentation(self) -> Fraction:
        return sum(self.terms.values(), Fraction(0))

    def format(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda kv: kv[0])
        return " + ".join(f"{c}*[{w.format(names)}]" for w, c in items)


def fox_derivative(w: Word, i: int) -> FreeRingElt:
    """Fox derivative of ``w`` with respect to generator ``i``."""
    terms: dict[Word, Fraction] = {}
    prefix: list[tuple[int, int]] = []
    for g, e in w.letters:
        step = 1 if e > 0 else -1
        for _ in range(abs(e)):
            if g == i:
                if step > 0:
                    key = Word(prefix)
                    terms[key] = terms.get(key, 0) + 1
                else:
                    key = Word(prefix + [(g, -1)])
                    terms[key] = terms.get(key, 0) - 1
            prefix.append((g, step))
    return FreeRingElt(terms)


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...] = ()
    name: str | None = None
    source_relators: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if len(set(self.generators)) != len(self.generators):
            raise PresentationError("duplicate generator names")
        n = len(self.generators)
        reduced = []
        for r in self.relators:
            if any(g >= n or g < 0 for g in r.generators()):
                raise PresentationError("relator uses an undeclared generator index")
            reduced.append(r.cyclically_reduced())
        object.__setattr__(self, "relators", tuple(reduced))

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def gen_index(self, name: str) -> int:
        return self.generators.index(name)

    def word(self, text: str) -> Word:
        """Parse a word in this presentation's generators."""
        return parse_word(text, self.generators)

    def exponent_matrix(self) -> list[list[int]]:
        return [r.exponent_sums(self.ngens) for r in self.relators]

    def serialize(self) -> str:
        lines = []
        if self.name:
            lines.append(f"group {self.name}")
        lines.append("gens " + " ".join(self.generators) if self.generators else "gens")
        for r in self.relators:
            lines.append("rel " + r.format(self.generators))
        return "\n".join(lines) + "\n"


def fox_jacobian(p: Presentation) -> list[list[FreeRingElt]]:
    return [[fox_derivative(r, i) for i in range(p.ngens)] for r in p.relators]


@dataclass(frozen=True)
class GroupHom:
    source: Presentation
    target: Presentation
    images: tuple[Word, ...]
    name: str | None = None

    def __post_init__(self):
        if len(self.images) != self.source.ngens:
            raise PresentationError(
                f"homomorphism needs {self.source.ngens} images, got {len(self.images)}")
        for w in self.images:
            if any(g >= self.target.ngens for g in w.generators()):
                raise PresentationError("image uses an undeclared target generator")

    def apply(self, w: Word) -> Word:
        return apply_hom(self, w)

    def visibly_onto(self) -> bool:
        """Every target generator is, up to inversion, the image of a source generator."""
        hit = {im.letters[0][0] for im in self.images if len(im.letters) == 1 and abs(im.letters[0][1]) == 1}
        return hit >= set(range(self.target.ngens))


def apply_hom(h: GroupHom, w: Word) -> Word:
    letters: list[tuple[int, int]] = []
    for g, e in w.letters:
        img = h.images[g] if e > 0 else h.images[g].inverse()
        letters.extend(img.letters * abs(e))
    return Word(letters)


def identity_hom(p: Presentation) -> GroupHom:
    return GroupHom(p, p, tuple(Word.gen(i) for i in range(p.ngens)))


# --- text formats -----------------------------------------------------------

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_TOKEN = re.compile(rf"(~?)({_IDENT})(?:\^(-?\d+))?$")


def _parse_token(tok: str, gens: Sequence[str], line: int | None, col: int | None) -> tuple[int, int]:
    m = _TOKEN.match(tok)
    if not m:
        raise PresentationError(f"malformed letter {tok!r}", line, col)
    tilde, ident, exp = m.groups()
    e = int(exp) if exp is not None else 1
    if ident in gens:
        g = gens.index(ident)
    elif ident.swapcase() in gens and not tilde:
        # case-inverted shorthand, only when it cannot name a declared generator
        g = gens.index(ident.swapcase())
        e = -e
    else:
        raise PresentationError(f"unknown generator {ident!r}", line, col)
    if tilde:
        e = -e
    if e == 0:
        raise PresentationError(f"zero exponent in {tok!r}", line, col)
    return g, e


def _tokens_with_columns(text: str, offset: int) -> list[tuple[str, int]]:
    return [(m.group(0), offset + m.start() + 1) for m in re.finditer(r"\S+", text)]


def parse_word(text: str, gens: Sequence[str], line: int | None = None, offset: int = 0) -> Word:
    letters = []
    for tok, col in _tokens_with_columns(text, offset):
        if tok == "1":
            continue
        letters.append(_parse_token(tok, gens, line, col))
    return Word(letters)


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse_presentation(text: str) -> Presentation:
    name = None
    gens: list[str] | None = None
    relators: list[Word] = []
    sources: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        stripped = line.lstrip()
        indent = len(line) - len(stripped)
        head, _, rest = stripped.partition(" ")
        rest_offset = indent + len(head) + 1
        if head == "group":
            if not rest.strip():
                raise PresentationError("group directive needs a name", lineno, indent + 1)
            name = rest.strip()
        elif head == "gens":
            if gens is not None:
                raise PresentationError("duplicate gens directive", lineno, indent + 1)
            gens = []
            for tok, col in _tokens_with_columns(rest, rest_offset):
                if not re.fullmatch(_IDENT, tok):
                    raise PresentationError(f"invalid generator name {tok!r}", lineno, col)
                if tok in gens:
                    raise PresentationError(f"duplicate generator {tok!r}", lineno, col)
                gens.append(tok)
        elif head == "rel":
            if gens is None:
                raise PresentationError("rel before gens", lineno, indent + 1)
            if not gens:
                raise PresentationError("relator given but generator list is empty", lineno, indent + 1)
            relators.append(parse_word(rest, gens, lineno, rest_offset))
            sources.append(rest.strip())
        else:
            raise PresentationError(f"unknown directive {head!r}", lineno, indent + 1)
    if gens is None:
        raise PresentationError("missing gens directive")
    return Presentation(tuple(gens), tuple(relators), name, tuple(sources))


def load_presentation(path: str | Path) -> Presentation:
    return parse_presentation(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class MapSpec:
    name: str | None
    source_path: str
    target_path: str
    hom: GroupHom


def parse_map(text: str, base_dir: str | Path = ".", loader=load_presentation) -> MapSpec:
    """Parse the homomorphism file format; endpoint paths resolve against ``base_dir``."""
    name = src = dst = None
    raw_images: list[tuple[str, str, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "map":
            name = rest
        elif head == "from":
            src = rest
        elif head == "to":
            dst = rest
        elif head == "img":
            lhs, eq, rhs = rest.partition("=")
            if not eq:
                raise PresentationError("img directive needs '='", lineno)
            raw_images.append((lhs.strip(), rhs, lineno, raw.index("=") + 2))
        else:
            raise PresentationError(f"unknown directive {head!r}", lineno, 1)
    if src is None or dst is None:
        raise PresentationError("map file needs both 'from' and 'to'")
    base = Path(base_dir)
    source = loader(base / src)
    target = loader(base / dst)
    images: dict[str, Word] = {}
    for gen, rhs, lineno, col in raw_images:
        if gen not in source.generators:
            raise PresentationError(f"unknown source generator {gen!r}", lineno)
        if gen in images:
            raise PresentationError(f"duplicate image for {gen!r}", lineno)
        images[gen] = parse_word(rhs, target.generators, lineno, col - 1)
    missing = [g for g in source.generators if g not in images]
    if missing:
        raise PresentationError(f"missing images for {', '.join(missing)}")
    hom = GroupHom(source, target, tuple(images[g] for g in source.generators), name)
    return MapSpec(name, src, dst, hom)
