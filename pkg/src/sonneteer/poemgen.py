"""End-to-end poem generation.

Pipeline: pick an author model, score rhyme pairs against the prompt
topic, sample a rhyme plan, beam-search every line backward from its
rhyme word, sample each line from the best drafts, place commas, and
apply the form's terminal periods. The finished poem is re-verified by
the linter before it is returned; a poem that fails its own constraints
is a bug, not an output.

Randomness is split into named substreams of the master seed (plan,
one per line, punctuation) so serial and worker-pool runs emit
byte-identical poems.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources as importlib_resources

from . import __version__
from .corpus import AuthorBundle, _tokenize_piece, make_bundle
from .embeddings import EmbeddingTable, load_vector_file, topic_vector
from .errors import GenerationError, SearchError
from .forms import FORMS, Form
from .grammar import (
    ForbiddenRuleSet,
    TagLexicon,
    load_rules_file,
    load_tag_lexicon_file,
)
from .langmodel import COMMA, PERIOD, NGramModel
from .linesearch import CandidateIndex, LineDraft, beam_search_line, sample_line
from .lint import has_errors, lint_lines
from .phonodict import PronouncingDict, Pronunciation, Relaxations, load_cmu_dict
from .punctuate import (
    CommaBudget,
    finalize_line_ends,
    place_commas,
    sample_budget,
    scale_budget,
    score_insertions,
)
from .rhymeplan import (
    PlannedRhyme,
    RhymePlan,
    build_distribution,
    draw_pair,
    enumerate_pairs,
    sample_plan,
)
from .rng import PLAN_STREAM, PUNCT_STREAM, substream


@dataclass
class GenerationConfig:
    prompt: str
    seed: int
    form: str = "sonnet"
    author: str = "random"
    beam_width: int = 20
    top_k: int = 10
    rhyme_temperature: float = 0.1
    comma_range: tuple[int, int] = (4, 8)  # per sonnet; scaled to the form
    relaxations: Relaxations = Relaxations()
    sample_proportional: bool = False
    forbid_matching_onsets: bool = False
    max_retries: int = 3
    jobs: int = 1
    min_vocab: int = 500
    # resource paths, used when no Resources object is supplied
    dict_path: str | None = None
    embeddings_path: str | None = None
    tag_lexicon_path: str | None = None
    pos_rules_path: str | None = None
    bundle_paths: tuple[str, ...] = ()


def default_data_path(name: str) -> str:
    return str(importlib_resources.files("sonneteer").joinpath("data", name))


@dataclass
class Resources:
    """Loaded, immutable inputs shared by any number of generations."""

    dictionary: PronouncingDict
    table: EmbeddingTable
    lexicon: TagLexicon
    rules: ForbiddenRuleSet
    bundles: dict[str, AuthorBundle]
    _indexes: dict = field(default_factory=dict, repr=False)

    @classmethod
    def load(cls, config: GenerationConfig) -> "Resources":
        if not config.dict_path or not config.embeddings_path:
            raise GenerationError("resource loading: dictionary and embeddings paths required")
        if not config.bundle_paths:
            raise GenerationError("resource loading: at least one model bundle required")
        dictionary = load_cmu_dict(config.dict_path)
        table = load_vector_file(config.embeddings_path)
        lexicon = load_tag_lexicon_file(
            config.tag_lexicon_path or default_data_path("tag_lexicon.txt")
        )
        rules = load_rules_file(
            config.pos_rules_path or default_data_path("pos_rules.txt")
        )
        bundles = {}
        for path in config.bundle_paths:
            model = NGramModel.load_file(path)
            author = model.author or _stem(path)
            bundles[author] = make_bundle(
                author, model, dictionary, table, min_vocab=config.min_vocab
            )
        return cls(dictionary, table, lexicon, rules, bundles)

    def index_for(
        self, author: str, template: str, relaxations: Relaxations
    ) -> CandidateIndex:
        key = (author, template, relaxations)
        if key not in self._indexes:
            bundle = self.bundles[author]
            self._indexes[key] = CandidateIndex(
                self.dictionary,
                set(bundle.generation_vocab),
                self.lexicon,
                bundle.model,
                template,
                relaxations,
            )
        return self._indexes[key]


def _stem(path: str) -> str:
    import os

    return os.path.splitext(os.path.basename(path))[0]


@dataclass
class Poem:
    form: Form
    prompt: str
    seed: int
    author: str
    lines: list[list[str]]  # words only
    punctuated: list[list[str]]  # words plus comma/period tokens
    prons: list[list[Pronunciation]]
    line_scores: list[float]
    plan: RhymePlan
    comma_count: int

    def text(self) -> str:
        return "\n".join(render_tokens(toks) for toks in self.punctuated)

    def metadata(self) -> dict:
        return {
            "version": __version__,
            "seed": self.seed,
            "prompt": self.prompt,
            "form": self.form.name,
            "scheme": self.form.scheme,
            "author": self.author,
            "comma_count": self.comma_count,
            "lines": [
                {
                    "text": render_tokens(self.punctuated[i]),
                    "words": list(self.lines[i]),
                    "variants": [p.variant for p in self.prons[i]],
                    "score": self.line_scores[i],
                    "rhyme_word": self.plan.by_line[i].word,
                    "rhyme_key": list(self.plan.by_line[i].key),
                }
                for i in range(len(self.lines))
            ],
        }


def render_tokens(tokens: list[str]) -> str:
    out = ""
    for tok in tokens:
        if tok in (COMMA, PERIOD):
            out += tok
            continue
        if tok == "i" or tok.startswith("i'"):
            tok = "I" + tok[1:]
        out += (" " if out else "") + tok
    for i, ch in enumerate(out):
        if ch.isalpha():
            return out[:i] + ch.upper() + out[i + 1 :]
    return out


def _prompt_tokens(prompt: str) -> list[str]:
    tokens = [t for t in _tokenize_piece(prompt) if t not in (COMMA, PERIOD)]
    if not tokens:
        raise GenerationError(f"prompt {prompt!r} contains no usable tokens")
    return tokens


def generate(config: GenerationConfig, resources: Resources | None = None) -> Poem:
    """Generate one poem; every stage error is re-raised with its stage."""
    if resources is None:
        resources = Resources.load(config)
    form = FORMS.get(config.form)
    if form is None:
        raise GenerationError(f"unknown form {config.form!r}")

    plan_rng = substream(config.seed, PLAN_STREAM)
    if config.author == "random":
        names = sorted(resources.bundles)
        author = names[plan_rng.randrange(len(names))]
    else:
        author = config.author
    bundle = resources.bundles.get(author)
    if bundle is None:
        raise GenerationError(f"author choice: no bundle for {author!r}")
    lm = bundle.model

    try:
        topic = topic_vector(_prompt_tokens(config.prompt), resources.table)
    except ValueError as exc:
        raise GenerationError(f"topic scoring: {exc}") from exc

    try:
        pairs = enumerate_pairs(
            resources.dictionary,
            set(bundle.generation_vocab),
            topic,
            resources.table,
            template=form.template,
            relaxations=config.relaxations,
            min_keys=len(form.letters),
            forbid_matching_onsets=config.forbid_matching_onsets,
        )
        dist = build_distribution(pairs, config.rhyme_temperature)
        plan, alive = sample_plan(dist, form, plan_rng)
    except (GenerationError, ValueError) as exc:
        raise GenerationError(f"rhyme planning: {exc}") from exc

    index = resources.index_for(author, form.template, config.relaxations)
    line_rngs = [substream(config.seed, 1 + i) for i in range(form.line_count)]

    def search(planned: PlannedRhyme) -> list[LineDraft]:
        return beam_search_line(
            planned.word,
            planned.variant,
            lm,
            index,
            resources.rules,
            width=config.beam_width,
            keep=config.top_k,
        )

    def run_line(i: int) -> LineDraft | SearchError:
        try:
            drafts = search(plan.by_line[i])
        except SearchError as exc:
            return exc
        return sample_line(
            drafts, line_rngs[i], proportional=config.sample_proportional
        )

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(run_line, range(form.line_count)))
    else:
        results = [run_line(i) for i in range(form.line_count)]

    # A dead-ended rhyme word retires its letter's pair and redraws from
    # the surviving distribution; the other letters' keys are untouched.
    for letter in form.letters:
        a, b = form.lines_of(letter)
        if not (isinstance(results[a], SearchError) or isinstance(results[b], SearchError)):
            continue
        last = results[a] if isinstance(results[a], SearchError) else results[b]
        for attempt in range(config.max_retries):
            try:
                pair, alive = draw_pair(dist, alive, plan_rng)
            except GenerationError as exc:
                raise GenerationError(
                    f"line search: letter {letter} exhausted the rhyme "
                    f"distribution ({exc})"
                ) from exc
            planned_a = PlannedRhyme(pair.word_a, pair.variant_a, pair.key)
            planned_b = PlannedRhyme(pair.word_b, pair.variant_b, pair.key)
            if plan_rng.random() < 0.5:
                plan.by_line[a], plan.by_line[b] = planned_a, planned_b
            else:
                plan.by_line[a], plan.by_line[b] = planned_b, planned_a
            try:
                results[a] = sample_line(
                    search(plan.by_line[a]), line_rngs[a],
                    proportional=config.sample_proportional,
                )
                results[b] = sample_line(
                    search(plan.by_line[b]), line_rngs[b],
                    proportional=config.sample_proportional,
                )
                break
            except SearchError as exc:
                last = exc
        else:
            raise GenerationError(
                f"line search: letter {letter} failed after "
                f"{config.max_retries} retries ({last})"
            )
    plan.check()

    drafts: list[LineDraft] = results  # type: ignore[assignment]
    word_lines = [list(d.words) for d in drafts]
    prons = [list(d.prons) for d in drafts]
    scores = [d.score for d in drafts]

    budget = scale_budget(CommaBudget(*config.comma_range), form.line_count)
    n_commas = sample_budget(budget, substream(config.seed, PUNCT_STREAM))
    try:
        if n_commas > 0:
            points = score_insertions(word_lines, lm, form)
            punctuated = place_commas(word_lines, points, n_commas)
        else:
            punctuated = [list(w) for w in word_lines]
        placed = sum(toks.count(COMMA) for toks in punctuated)
        punctuated = finalize_line_ends(punctuated, form)
    except GenerationError as exc:
        raise GenerationError(f"punctuation: {exc}") from exc

    findings = lint_lines(
        word_lines,
        form.scheme,
        resources.dictionary,
        resources.lexicon,
        resources.rules,
        relaxations=config.relaxations,
        template=form.template,
        prons=prons,
    )
    if has_errors(findings):
        details = "; ".join(str(f) for f in findings if f.severity == "error")
        raise GenerationError(f"internal lint rejected the poem: {details}")

    return Poem(
        form,
        config.prompt,
        config.seed,
        author,
        word_lines,
        punctuated,
        prons,
        scores,
        plan,
        placed,
    )
