"""Parser for the supported FML subset.

Element and attribute names follow the IEEE 1855 schema where the standard
defines them; the exact tag set is documented in ``docs/fml.md``.  Anything
outside the supported subset is rejected with a diagnostic carrying the
element name and source line — unsupported vocabulary is never silently
ignored.
"""

from __future__ import annotations

import xml.parsers.expat
from dataclasses import dataclass, field

from .model import (
    Clause,
    FuzzyRule,
    FuzzySystem,
    FuzzyTerm,
    LinguisticVariable,
    MembershipFunction,
    RuleBase,
    AND_METHODS,
    OR_METHODS,
    ACTIVATION_METHODS,
    ACCUMULATION_METHODS,
    DEFUZZIFIERS,
    validate,
)


class FmlError(ValueError):
    """Raised when an FML document cannot be parsed into a valid system.

    ``line`` is the 1-based source line of the offending construct when known.
    """

    def __init__(self, message: str, line: int | None = None, violations=None):
        self.line = line
        self.violations = list(violations or [])
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")


@dataclass
class _Node:
    tag: str
    attrs: dict[str, str]
    line: int
    children: list["_Node"] = field(default_factory=list)
    text: str = ""


def _build_tree(text: str) -> _Node:
    parser = xml.parsers.expat.ParserCreate()
    root: list[_Node] = []
    stack: list[_Node] = []

    def start(tag, attrs):
        node = _Node(tag, dict(attrs), parser.CurrentLineNumber)
        if stack:
            stack[-1].children.append(node)
        else:
            root.append(node)
        stack.append(node)

    def end(tag):
        stack.pop()

    def chars(data):
        if stack:
            stack[-1].text += data

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    try:
        parser.Parse(text, True)
    except xml.parsers.expat.ExpatError as exc:
        raise FmlError(f"malformed XML: {xml.parsers.expat.errors.messages[exc.code]}",
                       exc.lineno) from exc
    if not root:
        raise FmlError("empty document")
    return root[0]


_SHAPE_TAGS = {
    "triangularShape": ("triangular", 3),
    "trapezoidShape": ("trapezoidal", 4),
    "gaussianShape": ("gaussian", 2),
    "singletonShape": ("singleton", 1),
    "leftLinearShape": ("left-linear", 2),
    "rightLinearShape": ("right-linear", 2),
}

_BOOL = {"true": True, "false": False}


def _check_attrs(node: _Node, required: tuple[str, ...], optional: tuple[str, ...] = ()):
    for name in required:
        if name not in node.attrs:
            raise FmlError(f"<{node.tag}> missing required attribute {name!r}", node.line)
    for name in node.attrs:
        if name not in required and name not in optional:
            raise FmlError(f"unsupported attribute {name!r} on <{node.tag}>", node.line)


def _number(node: _Node, attr: str) -> float:
    raw = node.attrs[attr]
    try:
        value = float(raw)
    except ValueError:
        raise FmlError(f"attribute {attr}={raw!r} on <{node.tag}> is not a number", node.line) from None
    if value != value or value in (float("inf"), float("-inf")):
        raise FmlError(f"attribute {attr}={raw!r} on <{node.tag}> is not finite", node.line)
    return value


def _only_children(node: _Node, allowed: tuple[str, ...]) -> list[_Node]:
    for child in node.children:
        if child.tag not in allowed:
            raise FmlError(f"unsupported element <{child.tag}> inside <{node.tag}>", child.line)
    return node.children


def _parse_term(node: _Node) -> FuzzyTerm:
    _check_attrs(node, ("name",), ("complement",))
    complement_raw = node.attrs.get("complement", "false")
    if complement_raw not in _BOOL:
        raise FmlError(f"complement must be true/false, got {complement_raw!r}", node.line)
    shapes = _only_children(node, tuple(_SHAPE_TAGS))
    if len(shapes) != 1:
        raise FmlError(f"<{node.tag}> needs exactly one shape element, found {len(shapes)}", node.line)
    shape_node = shapes[0]
    shape, nparams = _SHAPE_TAGS[shape_node.tag]
    _check_attrs(shape_node, tuple(f"param{i + 1}" for i in range(nparams)))
    params = tuple(_number(shape_node, f"param{i + 1}") for i in range(nparams))
    return FuzzyTerm(node.attrs["name"], MembershipFunction(shape, params), _BOOL[complement_raw])


def _parse_variable(node: _Node) -> LinguisticVariable:
    _check_attrs(node, ("name", "type", "domainLeft", "domainRight"),
                 ("units", "defaultValue"))
    role = node.attrs["type"]
    if role not in ("input", "output"):
        raise FmlError(f"variable type must be input or output, got {role!r}", node.line)
    terms = tuple(_parse_term(t) for t in _only_children(node, ("fuzzyTerm",)))
    default = _number(node, "defaultValue") if "defaultValue" in node.attrs else None
    return LinguisticVariable(
        name=node.attrs["name"],
        role=role,
        domain=(_number(node, "domainLeft"), _number(node, "domainRight")),
        terms=terms,
        units=node.attrs.get("units", ""),
        default_value=default,
    )


def _parse_clause(node: _Node) -> Clause:
    _check_attrs(node, ("variable", "term"))
    _only_children(node, ())
    return Clause(node.attrs["variable"], node.attrs["term"])


def _parse_rule(node: _Node) -> FuzzyRule:
    _check_attrs(node, ("name",), ("weight", "connector"))
    connector = node.attrs.get("connector", "and")
    if connector not in ("and", "or"):
        raise FmlError(f"connector must be and/or, got {connector!r}", node.line)
    weight = _number(node, "weight") if "weight" in node.attrs else 1.0
    parts = {c.tag: c for c in _only_children(node, ("antecedent", "consequent"))}
    for part in ("antecedent", "consequent"):
        if part not in parts:
            raise FmlError(f"rule {node.attrs['name']!r} is missing <{part}>", node.line)
    antecedent = tuple(_parse_clause(c) for c in _only_children(parts["antecedent"], ("clause",)))
    consequent = tuple(_parse_clause(c) for c in _only_children(parts["consequent"], ("clause",)))
    return FuzzyRule(node.attrs["name"], weight, connector, antecedent, consequent)


def _method(node: _Node, attr: str, allowed: tuple[str, ...], default: str) -> str:
    value = node.attrs.get(attr, default)
    if value not in allowed:
        raise FmlError(f"unsupported {attr} {value!r} (supported: {', '.join(allowed)})", node.line)
    return value


def parse_fml(text: str | bytes) -> FuzzySystem:
    """Parse an FML document into a validated :class:`FuzzySystem`.

    Raises :class:`FmlError` on malformed XML, unsupported vocabulary,
    or any violated system invariant; every diagnostic carries a line.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    root = _build_tree(text)
    if root.tag != "fuzzySystem":
        raise FmlError(f"root element must be <fuzzySystem>, got <{root.tag}>", root.line)
    _check_attrs(root, ("name",))
    sections = _only_children(root, ("knowledgeBase", "mamdaniRuleBase"))
    kb = [s for s in sections if s.tag == "knowledgeBase"]
    rb = [s for s in sections if s.tag == "mamdaniRuleBase"]
    if len(kb) != 1 or len(rb) != 1:
        raise FmlError("document needs exactly one <knowledgeBase> and one <mamdaniRuleBase>", root.line)

    var_nodes = _only_children(kb[0], ("fuzzyVariable",))
    _check_attrs(kb[0], ())
    variables = tuple(_parse_variable(v) for v in var_nodes)

    rb_node = rb[0]
    _check_attrs(rb_node, ("name",),
                 ("andMethod", "orMethod", "activationMethod", "accumulationMethod", "defuzzifier"))
    rule_nodes = _only_children(rb_node, ("rule",))
    rule_base = RuleBase(
        and_method=_method(rb_node, "andMethod", AND_METHODS, "MIN"),
        or_method=_method(rb_node, "orMethod", OR_METHODS, "MAX"),
        activation_method=_method(rb_node, "activationMethod", ACTIVATION_METHODS, "MIN"),
        accumulation_method=_method(rb_node, "accumulationMethod", ACCUMULATION_METHODS, "MAX"),
        defuzzifier=_method(rb_node, "defuzzifier", DEFUZZIFIERS, "COG"),
        rules=tuple(_parse_rule(r) for r in rule_nodes),
    )

    system = FuzzySystem(root.attrs["name"], variables, rule_base)
    violations = validate(system)
    if violations:
        lines = _path_lines(root, var_nodes, rule_nodes)
        first = violations[0]
        detail = "; ".join(str(v) for v in violations)
        raise FmlError(f"invalid system: {detail}",
                       lines.get(_path_root(first.path), root.line), violations)
    return system


def _path_root(path: str) -> str:
    # "variables[2].terms[0].mf" -> "variables[2]"; "rule_base.rules[3].x" -> "rule_base.rules[3]"
    parts = path.split(".")
    if parts[0].startswith("variables["):
        return parts[0]
    if len(parts) >= 2 and parts[1].startswith("rules["):
        return f"{parts[0]}.{parts[1]}"
    return parts[0]


def _path_lines(root: _Node, var_nodes: list[_Node], rule_nodes: list[_Node]) -> dict[str, int]:
    lines = {"variables": root.line, "rule_base": root.line}
    for i, node in enumerate(var_nodes):
        lines[f"variables[{i}]"] = node.line
    for i, node in enumerate(rule_nodes):
        lines[f"rule_base.rules[{i}]"] = node.line
    return lines
