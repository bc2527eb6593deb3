"""
Text grammar for decorated trees.

    tree   := factor ('*' factor)*
    factor := '1' | 'X^' index | 'Xi[' label ']' | 'I[' label ',' index '](' tree ')'
    index  := '(' int (',' int)* ')'

Serialization is `DecoratedTree.key`, which is canonical.
"""
import re
from fractions import Fraction
from typing import TYPE_CHECKING, Any

from src.trees import multi_index as mi
from src.trees.combination import LinearCombination
from src.trees.decorated import ZERO_NOISE, DecoratedTree, EdgeDecoration, Forest
from src.utils.errors import GrammarError, InvalidTree, UnknownLabel

if TYPE_CHECKING:
    from src.models.equation_spec import EquationSpec

_LABEL = re.compile(r"[A-Za-z0-9_]+")
_INT = re.compile(r"\d+")


class _TreeParser:
    def __init__(self, text: str, dim: int | None, spec: "EquationSpec | None"):
        self.text = text
        self.pos = 0
        self.dim = dim if dim is not None else (spec.dim if spec is not None else None)
        self.spec = spec

    def fail(self, message: str):
        raise GrammarError(self.text, self.pos, message)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, token: str) -> bool:
        self.skip()
        return self.text.startswith(token, self.pos)

    def expect(self, token: str):
        if not self.peek(token):
            self.fail(f"expected {token!r}")
        self.pos += len(token)

    def label(self) -> str:
        self.skip()
        m = _LABEL.match(self.text, self.pos)
        if not m:
            self.fail("expected a label")
        self.pos = m.end()
        return m.group(0)

    def index(self) -> tuple[int, ...]:
        self.expect("(")
        values = []
        while True:
            self.skip()
            m = _INT.match(self.text, self.pos)
            if not m:
                self.fail("expected a non-negative integer")
            values.append(int(m.group(0)))
            self.pos = m.end()
            if self.peek(","):
                self.pos += 1
                continue
            self.expect(")")
            break
        if self.dim is None:
            self.dim = len(values)
        elif len(values) != self.dim:
            self.fail(f"multi-index of length {len(values)}, expected {self.dim}")
        return tuple(values)

    def check_kernel(self, name: str):
        if self.spec is None:
            return
        if name in self.spec.noise_labels:
            raise InvalidTree(f"noise label {name!r} used on a kernel edge")
        if name not in self.spec.kernel_labels:
            raise UnknownLabel(f"unknown kernel label {name!r}")

    def check_noise(self, name: str):
        if self.spec is not None and name not in self.spec.noise_labels:
            raise UnknownLabel(f"unknown noise label {name!r}")

    def tree(self) -> dict[str, Any]:
        node = {"k": None, "noise": None, "branches": []}
        self.factor(node)
        while self.peek("*"):
            self.pos += 1
            self.factor(node)
        return node

    def factor(self, node: dict[str, Any]):
        self.skip()
        if self.peek("Xi["):
            self.pos += 3
            name = self.label()
            self.expect("]")
            self.check_noise(name)
            if name != ZERO_NOISE:
                if node["noise"] is not None:
                    raise InvalidTree("a node carries two noise edges")
                node["noise"] = name
        elif self.peek("X^"):
            self.pos += 2
            k = self.index()
            node["k"] = k if node["k"] is None else mi.add(node["k"], k)
        elif self.peek("I["):
            self.pos += 2
            name = self.label()
            self.check_kernel(name)
            self.expect(",")
            m = self.index()
            self.expect("]")
            self.expect("(")
            child = self.tree()
            self.expect(")")
            node["branches"].append((name, m, child))
        elif self.peek("1"):
            self.pos += 1
        else:
            self.fail("expected a factor")

    def build(self, node: dict[str, Any]) -> DecoratedTree:
        if self.dim is None:
            self.fail("cannot infer the dimension; pass dim or spec")
        k = node["k"] if node["k"] is not None else mi.zero(self.dim)
        branches = tuple(
            (EdgeDecoration(name, m), self.build(child)) for name, m, child in node["branches"]
        )
        return DecoratedTree(k, node["noise"], branches)

    def parse(self) -> DecoratedTree:
        node = self.tree()
        self.skip()
        if self.pos != len(self.text):
            self.fail("trailing input")
        return self.build(node)


def parse_tree(text: str, dim: int | None = None, spec: "EquationSpec | None" = None) -> DecoratedTree:
    return _TreeParser(text, dim, spec).parse()


def parse_forest(text: str, dim: int | None = None, spec: "EquationSpec | None" = None) -> Forest:
    """Parse `{t1 , t2}`; a bare tree is a one-tree forest."""
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        return Forest.of(parse_tree(body, dim, spec))
    body = body[1:-1].strip()
    if not body:
        return Forest()
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(body):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(body[start:i])
            start = i + 1
    parts.append(body[start:])
    return Forest(tuple(parse_tree(p, dim, spec) for p in parts))


def combination_from_records(records: list[dict[str, Any]], dim: int | None = None,
                             spec: "EquationSpec | None" = None) -> LinearCombination:
    out = LinearCombination()
    for rec in records:
        out.add_term(parse_tree(rec["tree"], dim, spec), Fraction(int(rec["num"]), int(rec.get("den", 1))))
    return out
