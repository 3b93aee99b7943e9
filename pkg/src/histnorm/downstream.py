"""Extrinsic evaluation through an external tagger.

A tagged corpus is normalized token by token, piped through a user-supplied
tagger command (one token per line in, ``token<TAB>tag`` per line out), the
predicted tags are mapped into the gold inventory through a user-supplied
tag map, and per-document accuracies are compared across normalizers with
paired t-tests. No specific tagger is shipped or wrapped.
"""

from __future__ import annotations

import json
import shlex
import statistics
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from histnorm.evaluation import Normalizer, paired_ttest

DISCARD = "<discard>"


class TaggerError(RuntimeError):
    pass


class TaggerProtocolError(TaggerError):
    pass


class UnmappedTagError(KeyError):
    def __init__(self, tag: str):
        super().__init__(tag)
        self.tag = tag

    def __str__(self) -> str:
        return f"tagger produced tag {self.tag!r} with no entry in the tag map"


@dataclass(frozen=True)
class TaggedDocument:
    doc_id: str
    tokens: tuple[tuple[str, str], ...]  # (wordform, gold tag)

    def __len__(self) -> int:
        return len(self.tokens)


class TagMap:
    """Total map from tagger output tags to gold tags. The special value
    ``<discard>`` excludes a token from scoring."""

    def __init__(self, mapping: dict[str, str]):
        self.mapping = dict(mapping)

    def apply(self, tag: str) -> str:
        try:
            return self.mapping[tag]
        except KeyError:
            raise UnmappedTagError(tag) from None

    @classmethod
    def load(cls, path) -> "TagMap":
        mapping = {}
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                fields = line.split("\t")
                if len(fields) != 2:
                    raise ValueError(f"{path}:{lineno}: expected tagger_tag<TAB>gold_tag")
                mapping[fields[0]] = fields[1]
        return cls(mapping)


def identity_tagmap(tags) -> TagMap:
    return TagMap({t: t for t in tags})


def load_tagged_corpus(path, lowercase: bool = False) -> list[TaggedDocument]:
    """Corpus file: ``# id:`` line names a document, blank line ends it,
    one ``token<TAB>gold_tag`` per line in between."""
    docs: list[TaggedDocument] = []
    doc_id = None
    tokens: list[tuple[str, str]] = []

    def close():
        nonlocal doc_id, tokens
        if tokens:
            docs.append(TaggedDocument(doc_id or f"doc{len(docs)}", tuple(tokens)))
        doc_id, tokens = None, []

    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                close()
                continue
            if line.startswith("# id:"):
                close()
                doc_id = line[len("# id:") :].strip()
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ValueError(f"{path}:{lineno}: expected token<TAB>gold_tag")
            token, tag = fields
            if lowercase:
                token = token.casefold()
            tokens.append((token, tag))
    close()
    return docs


def save_tagged_corpus(docs: Sequence[TaggedDocument], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for doc in docs:
            f.write(f"# id: {doc.doc_id}\n")
            for token, tag in doc.tokens:
                f.write(f"{token}\t{tag}\n")
            f.write("\n")


def normalize_document(doc: TaggedDocument, system: Normalizer) -> TaggedDocument:
    """Replace wordforms with the normalizer's output; gold tags untouched,
    token count preserved (normalization is 1:1)."""
    return TaggedDocument(doc.doc_id, tuple((system.normalize(tok), tag) for tok, tag in doc.tokens))


def run_tagger(tagger_cmd, tokens: Sequence[str]) -> list[tuple[str, str]]:
    """Feed tokens (one per line) to the tagger command, read back
    ``token<TAB>tag`` lines in the same order."""
    argv = shlex.split(tagger_cmd) if isinstance(tagger_cmd, str) else list(tagger_cmd)
    proc = subprocess.run(
        argv,
        input="\n".join(tokens) + ("\n" if tokens else ""),
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        raise TaggerError(
            f"tagger {argv[0]!r} exited with status {proc.returncode}; stderr: {proc.stderr.strip()!r}"
        )
    lines = proc.stdout.splitlines()
    if len(lines) != len(tokens):
        raise TaggerProtocolError(
            f"tagger emitted {len(lines)} lines for {len(tokens)} tokens"
        )
    out = []
    for i, line in enumerate(lines):
        fields = line.split("\t")
        if len(fields) != 2:
            raise TaggerProtocolError(f"tagger output line {i + 1}: expected token<TAB>tag")
        if fields[0] != tokens[i]:
            raise TaggerProtocolError(
                f"tagger output line {i + 1}: token {fields[0]!r} does not match input {tokens[i]!r}"
            )
        out.append((fields[0], fields[1]))
    return out


def tag_and_score(doc: TaggedDocument, tagger_cmd, tagmap: TagMap) -> float:
    """Fraction of tokens whose mapped predicted tag equals the gold tag.
    Tokens mapped to the discard marker are excluded from scoring."""
    tokens = [tok for tok, _ in doc.tokens]
    tagged = run_tagger(tagger_cmd, tokens)
    scored = correct = 0
    for (_, gold), (_, predicted) in zip(doc.tokens, tagged):
        mapped = tagmap.apply(predicted)
        if mapped == DISCARD:
            continue
        scored += 1
        correct += mapped == gold
    if scored == 0:
        raise ValueError(f"document {doc.doc_id!r}: no scorable tokens after tag mapping")
    return correct / scored


@dataclass(frozen=True)
class ComparisonResult:
    systems: tuple[str, ...]
    doc_ids: tuple[str, ...]
    accuracies: dict  # system name -> {doc id -> accuracy}
    means: dict  # system name -> mean accuracy
    stds: dict  # system name -> sample standard deviation
    ttests: dict  # (system a, system b) -> (t, p)

    def json_lines(self) -> list[str]:
        lines = []
        for system in self.systems:
            for doc_id in self.doc_ids:
                lines.append(
                    json.dumps(
                        {"document": doc_id, "system": system, "accuracy": self.accuracies[system][doc_id]},
                        ensure_ascii=False,
                    )
                )
        return lines

    def summary_dict(self) -> dict:
        return {
            "systems": list(self.systems),
            "means": self.means,
            "stds": self.stds,
            "ttests": [
                {"a": a, "b": b, "t": t, "p": p} for (a, b), (t, p) in self.ttests.items()
            ],
        }


def compare_systems(
    docs: Sequence[TaggedDocument],
    systems: Sequence[Normalizer],
    tagger_cmd,
    tagmap: TagMap,
    jobs: int = 1,
) -> ComparisonResult:
    """Per-document tagging accuracy for every normalizer, with pairwise
    two-tailed paired t-tests across documents."""
    if len(docs) < 2:
        raise ValueError("compare_systems needs at least 2 documents")
    names = [s.name for s in systems]
    if len(set(names)) != len(names):
        raise ValueError("normalizer names must be unique")

    def score_one(args):
        system, doc = args
        try:
            return system.name, doc.doc_id, tag_and_score(normalize_document(doc, system), tagger_cmd, tagmap)
        except Exception as e:
            raise TaggerError(f"document {doc.doc_id!r}, system {system.name!r}: {e}") from e

    tasks = [(system, doc) for system in systems for doc in docs]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(score_one, tasks))
    else:
        results = [score_one(t) for t in tasks]

    accuracies: dict[str, dict[str, float]] = {name: {} for name in names}
    for name, doc_id, acc in results:
        accuracies[name][doc_id] = acc
    doc_ids = tuple(d.doc_id for d in docs)
    means = {name: statistics.fmean(accuracies[name][d] for d in doc_ids) for name in names}
    stds = {
        name: statistics.stdev(accuracies[name][d] for d in doc_ids) if len(doc_ids) > 1 else 0.0
        for name in names
    }
    ttests = {}
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            ttests[(a, b)] = paired_ttest(
                [accuracies[a][d] for d in doc_ids], [accuracies[b][d] for d in doc_ids]
            )
    return ComparisonResult(
        systems=tuple(names),
        doc_ids=doc_ids,
        accuracies=accuracies,
        means=means,
        stds=stds,
        ttests=ttests,
    )
