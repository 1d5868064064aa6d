#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Разбор исходников подмножества Java в структурную модель классов

Поддерживается: class NAME [extends NAME] { поля; методы; конструкторы },
одиночное наследование, if/else, for, while, do-while, switch/case,
try/catch, return, выражения, тернарный оператор, && и ||.
Интерфейсы, generics, лямбды, аннотации и вложенные классы - ошибка разбора.
"""

import json
import logging
import re
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple

import javalang
from javalang import tree as jtree
from javalang.parser import JavaSyntaxError
from javalang.tokenizer import LexerError

from metric_errors import DuplicateClassError, SourceEncodingError, SourceSyntaxError
from utils import write_json

logger = logging.getLogger(__name__)

SOURCE_SUFFIX = ".java"


class DecisionKind(str, Enum):
    """Виды точек ветвления (закрытый список)"""
    IF = "if"
    LOOP = "loop"
    CASE_LABEL = "case_label"
    CATCH_CLAUSE = "catch_clause"
    TERNARY = "ternary"
    SHORT_CIRCUIT_AND = "short_circuit_and"
    SHORT_CIRCUIT_OR = "short_circuit_or"


DECISION_ORDER = tuple(DecisionKind)


@dataclass(frozen=True)
class SourceFile:
    path: str
    content: str


@dataclass(frozen=True)
class MethodDecl:
    name: str
    decision_points: Dict[DecisionKind, int] = field(default_factory=dict)
    accessed_fields: FrozenSet[str] = frozenset()
    # this.x / super.x без собственного поля: возможно унаследованное, в LCOM не входит
    unresolved_fields: FrozenSet[str] = frozenset()
    is_constructor: bool = False


@dataclass(frozen=True)
class ClassDecl:
    name: str
    qualified_name: str
    parent_name: Optional[str] = None
    fields: Tuple[str, ...] = ()
    methods: Tuple[MethodDecl, ...] = ()
    source_path: str = ""
    package: Optional[str] = None
    imports: Tuple[str, ...] = ()


# Узлы вне подмножества грамматики
_UNSUPPORTED_NODES = (
    (jtree.InterfaceDeclaration, "интерфейсы не поддерживаются"),
    (jtree.EnumDeclaration, "перечисления не поддерживаются"),
    (jtree.AnnotationDeclaration, "объявления аннотаций не поддерживаются"),
    (jtree.ClassDeclaration, "вложенные классы не поддерживаются"),
    (jtree.LambdaExpression, "лямбда-выражения не поддерживаются"),
    (jtree.MethodReference, "ссылки на методы не поддерживаются"),
    (jtree.Annotation, "аннотации не поддерживаются"),
    (jtree.TypeParameter, "generics не поддерживаются"),
    (jtree.TypeArgument, "generics не поддерживаются"),
    (jtree.SynchronizedStatement, "synchronized не поддерживается"),
    (jtree.AssertStatement, "assert не поддерживается"),
    (jtree.TryResource, "try-with-resources не поддерживается"),
)


def read_source_file(path) -> SourceFile:
    """Читает файл как UTF-8; иначе SourceEncodingError"""
    path = Path(path)
    raw = path.read_bytes()
    try:
        content = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise SourceEncodingError(path, f"(байт {e.start})") from e
    return SourceFile(path=str(path), content=content.lstrip("\ufeff"))


def discover_sources(root) -> List[Path]:
    """Находит все .java файлы в дереве каталогов (отсортированы)"""
    root = Path(root)
    if root.is_file():
        return [root] if root.suffix == SOURCE_SUFFIX else []
    return sorted(p for p in root.rglob(f"*{SOURCE_SUFFIX}") if p.is_file())


def _walk(obj) -> Iterator[jtree.Node]:
    """Обход AST в глубину; принимает узел или список узлов"""
    stack = [obj]
    while stack:
        cur = stack.pop()
        if cur is None:
            continue
        if isinstance(cur, javalang.ast.Node):
            yield cur
            for child in reversed(cur.children):
                if isinstance(child, (list, tuple, javalang.ast.Node)):
                    stack.append(child)
        elif isinstance(cur, (list, tuple)):
            stack.extend(reversed(cur))


def _position(node, fallback=None):
    pos = getattr(node, "position", None) or fallback
    if pos is None:
        return None, None
    return pos[0], pos[1]


def _syntax_error(source: SourceFile, node, message, fallback=None) -> SourceSyntaxError:
    line, column = _position(node, fallback)
    return SourceSyntaxError(source.path, line, column, message)


def _check_subset(source: SourceFile, class_node) -> None:
    """Отвергает конструкции вне подмножества грамматики"""
    if class_node.implements:
        raise _syntax_error(source, class_node, "implements не поддерживается (нет интерфейсов)")

    fallback = class_node.position
    for node in _walk(class_node):
        if node is class_node:
            continue
        fallback = getattr(node, "position", None) or fallback
        for node_type, message in _UNSUPPORTED_NODES:
            if isinstance(node, node_type):
                raise _syntax_error(source, node, message, fallback)
        if isinstance(node, jtree.ClassCreator) and node.body is not None:
            raise _syntax_error(source, node, "анонимные классы не поддерживаются", fallback)
        if isinstance(node, jtree.Statement) and getattr(node, "label", None):
            raise _syntax_error(source, node, "метки операторов не поддерживаются", fallback)


def count_decision_points(body) -> Dict[DecisionKind, int]:
    """Считает точки ветвления в теле метода (только ненулевые, в порядке DecisionKind)"""
    counts = {kind: 0 for kind in DECISION_ORDER}
    for node in _walk(body):
        if isinstance(node, jtree.IfStatement):
            counts[DecisionKind.IF] += 1
        elif isinstance(node, (jtree.ForStatement, jtree.WhileStatement, jtree.DoStatement)):
            counts[DecisionKind.LOOP] += 1
        elif isinstance(node, jtree.SwitchStatementCase):
            # default не метка case
            counts[DecisionKind.CASE_LABEL] += sum(
                1 for label in (node.case or []) if label is not None and label != "default"
            )
        elif isinstance(node, jtree.CatchClause):
            counts[DecisionKind.CATCH_CLAUSE] += 1
        elif isinstance(node, jtree.TernaryExpression):
            counts[DecisionKind.TERNARY] += 1
        elif isinstance(node, jtree.BinaryOperation):
            if node.operator == "&&":
                counts[DecisionKind.SHORT_CIRCUIT_AND] += 1
            elif node.operator == "||":
                counts[DecisionKind.SHORT_CIRCUIT_OR] += 1
    return {kind: count for kind, count in counts.items() if count}


def _declared_names(declaration) -> List[str]:
    if not isinstance(declaration, jtree.VariableDeclaration):
        return []
    return [d.name for d in (declaration.declarators or [])]


def _walk_block(statements, scope: set) -> Iterator[Tuple[jtree.Node, FrozenSet[str]]]:
    """Последовательность операторов; локальная переменная видна с места объявления до конца блока"""
    for statement in statements or []:
        if isinstance(statement, jtree.LocalVariableDeclaration):
            yield statement, frozenset(scope)
            for declarator in statement.declarators or []:
                scope.add(declarator.name)
                yield from _walk_scoped(declarator.initializer, frozenset(scope))
        else:
            yield from _walk_scoped(statement, frozenset(scope))


def _walk_scoped(node, shadowed: FrozenSet[str]) -> Iterator[Tuple[jtree.Node, FrozenSet[str]]]:
    """
    Обход AST метода с учетом областей видимости

    Каждый узел выдается вместе с множеством имен (параметры и локальные
    переменные), которые в этой точке перекрывают поля класса.
    """
    if node is None:
        return
    if isinstance(node, (list, tuple)):
        yield from _walk_block(node, set(shadowed))
        return
    if not isinstance(node, javalang.ast.Node):
        return

    yield node, shadowed
    if isinstance(node, jtree.BlockStatement):
        yield from _walk_block(node.statements, set(shadowed))
    elif isinstance(node, jtree.ForStatement):
        control = node.control
        variable = getattr(control, "init", None) or getattr(control, "var", None)
        inner = shadowed | frozenset(_declared_names(variable))
        yield from _walk_scoped(control, inner)
        yield from _walk_scoped(node.body, inner)
    elif isinstance(node, jtree.CatchClause):
        inner = shadowed | {node.parameter.name}
        yield from _walk_block(node.block, set(inner))
    elif isinstance(node, jtree.SwitchStatement):
        yield from _walk_scoped(node.expression, shadowed)
        # весь блок switch - одна область видимости
        scope = set(shadowed)
        for case in node.cases or []:
            yield case, frozenset(scope)
            yield from _walk_scoped(case.case, frozenset(scope))
            yield from _walk_block(case.statements, scope)
    else:
        for child in node.children:
            if isinstance(child, (list, tuple, javalang.ast.Node)):
                yield from _walk_scoped(child, shadowed)


def _qualified_candidate(qualifier: str, member: Optional[str], class_name: Optional[str]):
    """
    Имя поля, к которому относится квалифицированное обращение

    Returns:
        (имя, квалифицировано ли именем класса)
    """
    parts = qualifier.split(".")
    if class_name and parts[0] == class_name:
        if len(parts) > 1:
            return parts[1], True
        return member, True
    return parts[0], False


def collect_field_accesses(method_node, own_fields,
                           class_name: Optional[str] = None) -> Tuple[FrozenSet[str], FrozenSet[str]]:
    """
    Определяет обращения метода к полям своего класса

    Идентификатор считается обращением к полю, если совпадает с объявленным полем
    (или записан как this.x / ИмяКласса.x) и в этой точке не перекрыт параметром
    или локальной переменной.

    Returns:
        (accessed_fields, unresolved_fields)
    """
    own_fields = set(own_fields)
    parameters = frozenset(p.name for p in (method_node.parameters or []))
    nodes = list(_walk_scoped(method_node.body, parameters))

    accessed = set()
    unresolved = set()
    selector_ids = set()

    for node, _ in nodes:
        selectors = getattr(node, "selectors", None) or []
        for selector in selectors:
            selector_ids.add(id(selector))
        if isinstance(node, jtree.This) and selectors:
            first = selectors[0]
            if isinstance(first, jtree.MemberReference):
                if first.member in own_fields:
                    accessed.add(first.member)
                else:
                    unresolved.add(first.member)
        elif isinstance(node, jtree.SuperMemberReference):
            if node.member in own_fields:
                accessed.add(node.member)
            else:
                unresolved.add(node.member)

    for node, shadowed in nodes:
        if id(node) in selector_ids:
            continue
        if isinstance(node, jtree.MemberReference):
            if node.qualifier:
                candidate, by_class = _qualified_candidate(node.qualifier, node.member, class_name)
            else:
                candidate, by_class = node.member, False
        elif isinstance(node, jtree.MethodInvocation) and node.qualifier:
            candidate, by_class = _qualified_candidate(node.qualifier, None, class_name)
            if candidate is None:
                continue
        else:
            continue
        if by_class:
            if candidate in own_fields:
                accessed.add(candidate)
            else:
                unresolved.add(candidate)
        elif candidate in own_fields and candidate not in shadowed:
            accessed.add(candidate)

    return frozenset(accessed), frozenset(unresolved)


def _build_class(source: SourceFile, class_node, package, imports) -> ClassDecl:
    _check_subset(source, class_node)

    fields: List[str] = []
    member_nodes = []
    for member in class_node.body or []:
        if member is None:
            continue
        if isinstance(member, jtree.FieldDeclaration):
            fields.extend(d.name for d in member.declarators)
        elif isinstance(member, (jtree.MethodDeclaration, jtree.ConstructorDeclaration)):
            member_nodes.append(member)
        else:
            raise _syntax_error(source, member if isinstance(member, javalang.ast.Node) else None,
                                "блоки инициализации и прочие члены класса не поддерживаются",
                                class_node.position)

    methods = []
    for member in member_nodes:
        accessed, unresolved = collect_field_accesses(member, fields, class_node.name)
        methods.append(MethodDecl(
            name=member.name,
            decision_points=count_decision_points(member.body),
            accessed_fields=accessed,
            unresolved_fields=unresolved,
            is_constructor=isinstance(member, jtree.ConstructorDeclaration),
        ))

    parent_name = None
    if class_node.extends is not None:
        parent_name = _reference_type_name(class_node.extends)

    qualified_name = f"{package}.{class_node.name}" if package else class_node.name
    return ClassDecl(
        name=class_node.name,
        qualified_name=qualified_name,
        parent_name=parent_name,
        fields=tuple(fields),
        methods=tuple(methods),
        source_path=source.path,
        package=package,
        imports=imports,
    )


def _reference_type_name(ref) -> str:
    """ReferenceType a.b.C хранится цепочкой sub_type"""
    parts = []
    while ref is not None:
        parts.append(ref.name)
        ref = getattr(ref, "sub_type", None)
    return ".".join(parts)


def _lexer_position(message):
    match = re.search(r"line (\d+)", message)
    return (int(match.group(1)), None) if match else (None, None)


def parse_file(source: SourceFile) -> List[ClassDecl]:
    """
    Разбирает один файл в список объявлений классов верхнего уровня

    Raises:
        SourceSyntaxError: текст вне подмножества грамматики (с позицией)
    """
    if not source.content or not source.content.strip():
        raise SourceSyntaxError(source.path, 1, 1, "пустой файл")

    try:
        unit = javalang.parse.parse(source.content)
    except JavaSyntaxError as e:
        line, column = _position(getattr(e, "at", None))
        raise SourceSyntaxError(source.path, line, column, e.description or "синтаксическая ошибка") from e
    except LexerError as e:
        line, column = _lexer_position(str(e))
        raise SourceSyntaxError(source.path, line, column, f"лексическая ошибка: {e}") from e

    package = unit.package.name if unit.package is not None else None
    imports = tuple(sorted(imp.path for imp in (unit.imports or []) if not imp.static and not imp.wildcard))

    classes: List[ClassDecl] = []
    seen = {}
    for type_node in unit.types or []:
        if not isinstance(type_node, jtree.ClassDeclaration):
            message = dict((t, m) for t, m in _UNSUPPORTED_NODES).get(type(type_node), "поддерживаются только классы")
            raise _syntax_error(source, type_node, message)
        class_decl = _build_class(source, type_node, package, imports)
        if class_decl.name in seen:
            raise DuplicateClassError(class_decl.qualified_name, source.path, source.path)
        seen[class_decl.name] = class_decl
        classes.append(class_decl)

    logger.debug(f"{source.path}: классов {len(classes)}")
    return classes


def parse_path(path) -> List[ClassDecl]:
    return parse_file(read_source_file(path))


def assemble_corpus(parsed: Iterable[Tuple[str, List[ClassDecl]]]) -> List[ClassDecl]:
    """Детерминированное слияние: файлы по порядку путей, классы по qualified_name"""
    by_name: Dict[str, ClassDecl] = {}
    for _, classes in sorted(parsed, key=lambda item: item[0]):
        for class_decl in classes:
            existing = by_name.get(class_decl.qualified_name)
            if existing is not None:
                raise DuplicateClassError(class_decl.qualified_name, existing.source_path, class_decl.source_path)
            by_name[class_decl.qualified_name] = class_decl
    return [by_name[name] for name in sorted(by_name)]


def build_corpus(files: List[SourceFile], workers=None) -> List[ClassDecl]:
    """
    Разбирает файлы (параллельно) и собирает корпус

    Raises:
        SourceSyntaxError: первая ошибка в порядке путей
        DuplicateClassError: одинаковый qualified_name в двух файлах
    """
    if not files:
        return []
    with ThreadPoolExecutor(max_workers=workers) as executor:
        results = list(executor.map(parse_file, files))
    return assemble_corpus(zip((f.path for f in files), results))


@dataclass
class AnalysisResult:
    corpus: List[ClassDecl]
    files: List[str]
    errors: List[Tuple[str, Exception]]


def analyze_directory(root, workers=None, progress_callback: Optional[Callable] = None) -> AnalysisResult:
    """
    Разбирает все .java файлы каталога, собирая ошибки по файлам

    Args:
        root: каталог с исходниками
        workers: число потоков (None = по умолчанию ThreadPoolExecutor)
        progress_callback: функция (progress, message) для отображения прогресса
    """
    paths = discover_sources(root)
    parsed = []
    errors = []

    with ThreadPoolExecutor(max_workers=workers) as executor:
        future_to_path = {executor.submit(parse_path, path): path for path in paths}
        for done, future in enumerate(as_completed(future_to_path), start=1):
            path = future_to_path[future]
            try:
                parsed.append((str(path), future.result()))
            except (SourceSyntaxError, SourceEncodingError, DuplicateClassError) as e:
                logger.error(f"Ошибка разбора {path}: {e}")
                errors.append((str(path), e))
            if progress_callback:
                progress_callback(done / len(paths) * 100, f"Разбор {path.name}...")

    errors.sort(key=lambda item: item[0])
    corpus = assemble_corpus(parsed) if not errors else []
    if progress_callback:
        progress_callback(100, "Разбор завершен")
    return AnalysisResult(corpus=corpus, files=[str(p) for p in paths], errors=errors)


# СЕРИАЛИЗАЦИЯ КОРПУСА

def method_to_json(method: MethodDecl) -> dict:
    return {
        "name": method.name,
        "decision_points": {kind.value: method.decision_points[kind]
                            for kind in DECISION_ORDER if method.decision_points.get(kind)},
        "accessed_fields": sorted(method.accessed_fields),
        "unresolved_fields": sorted(method.unresolved_fields),
        "is_constructor": method.is_constructor,
    }


def corpus_to_json(corpus: List[ClassDecl]) -> List[dict]:
    return [
        {
            "name": c.name,
            "qualified_name": c.qualified_name,
            "parent_name": c.parent_name,
            "fields": list(c.fields),
            "methods": [method_to_json(m) for m in c.methods],
            "source_path": c.source_path,
            "package": c.package,
            "imports": list(c.imports),
        }
        for c in corpus
    ]


def corpus_from_json(data: List[dict]) -> List[ClassDecl]:
    corpus = []
    for item in data:
        methods = tuple(
            MethodDecl(
                name=m["name"],
                decision_points={DecisionKind(k): int(v) for k, v in m.get("decision_points", {}).items() if v},
                accessed_fields=frozenset(m.get("accessed_fields", [])),
                unresolved_fields=frozenset(m.get("unresolved_fields", [])),
                is_constructor=bool(m.get("is_constructor", False)),
            )
            for m in item.get("methods", [])
        )
        qualified_name = item["qualified_name"]
        corpus.append(ClassDecl(
            name=item.get("name") or qualified_name.rsplit(".", 1)[-1],
            qualified_name=qualified_name,
            parent_name=item.get("parent_name"),
            fields=tuple(item.get("fields", [])),
            methods=methods,
            source_path=item.get("source_path", ""),
            package=item.get("package"),
            imports=tuple(item.get("imports", [])),
        ))
    return corpus


def save_corpus(corpus: List[ClassDecl], path) -> Path:
    return write_json(path, corpus_to_json(corpus))


def load_corpus(path) -> List[ClassDecl]:
    with open(path, "r", encoding="utf-8") as f:
        return corpus_from_json(json.load(f))
