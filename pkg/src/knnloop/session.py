"""Online-learning session: translate, accept a correction, adapt, repeat.

Greedy decoding under the interpolated distribution is the read path and
never mutates the datastores; :meth:`Session.adapt` is the only writer.
Adaptation labels policy entries against the datastore state from before
the current sentence (so a token never retrieves itself during label
induction) and then inserts policy and token entries atomically.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .base_model import BaseModel, ModelOutput
from .core import (
    EOS_ID,
    Distribution,
    Sentence,
    Token,
    argmax_token,
    interpolate,
    require_sentence,
)
from .errors import ContractViolation, EngineError, InputError
from .policy_knn import PolicyDatastore, build_features, induce_value
from .token_knn import (
    DEFAULT_K,
    DEFAULT_TEMPERATURE,
    TokenDatastore,
    TokenNeighborSet,
    knn_distribution,
)

TOP_CANDIDATES = 5


@dataclass(frozen=True)
class PolicyMode:
    """How the per-token interpolation weight is chosen during decoding."""

    kind: str  # "adaptive" | "constant" | "base_only"
    lam: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("adaptive", "constant", "base_only"):
            raise ContractViolation(f"unknown policy mode {self.kind!r}")
        if not 0.0 <= self.lam <= 1.0:
            raise ContractViolation("constant lambda must lie in [0, 1]")

    @classmethod
    def adaptive(cls) -> "PolicyMode":
        return cls("adaptive")

    @classmethod
    def constant(cls, lam: float) -> "PolicyMode":
        return cls("constant", lam)

    @classmethod
    def base_only(cls) -> "PolicyMode":
        return cls("base_only")


@dataclass(frozen=True)
class SessionConfig:
    """Session knobs. Decode length is capped at ``factor * |x| + extra``."""

    k: int = DEFAULT_K
    temperature: float = DEFAULT_TEMPERATURE
    policy_temperature: float = DEFAULT_TEMPERATURE
    fallback_lambda: float = 0.0
    max_len_factor: int = 2
    max_len_extra: int = 5

    def max_decode_length(self, source_length: int) -> int:
        return self.max_len_factor * source_length + self.max_len_extra


@dataclass(frozen=True)
class TokenDiagnostics:
    """Per emitted token: interpolation weight plus top candidates of each side."""

    token: Token
    lam: float
    p_nmt_top: tuple[tuple[Token, float], ...]
    p_knn_top: tuple[tuple[Token, float], ...]
    neighbor_distances: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class DecodeStep:
    """Full record of one decoding step, including the terminating one."""

    token: Token
    lam: float
    p_nmt: Distribution
    p_knn: Distribution | None
    p_final: Distribution
    neighbors: TokenNeighborSet | None


@dataclass(frozen=True)
class TranslationResult:
    hypothesis: Sentence
    diagnostics: tuple[TokenDiagnostics, ...]


@dataclass(frozen=True)
class AdaptReport:
    token_entries_added: int
    policy_entries_added: int


@dataclass(frozen=True)
class AdaptLogEntry:
    """One reference position seen during adaptation.

    ``p_knn_ref``, ``induced`` and ``predicted_lambda`` are None when the
    token datastore was empty at that position (no retrieval support).
    """

    token_id: int
    p_nmt_ref: float
    p_knn_ref: float | None
    induced: int | None
    predicted_lambda: float | None


@dataclass
class DocumentResult:
    hypotheses: list[Sentence]
    diagnostics: list[tuple[TokenDiagnostics, ...]]
    latencies_ms: list[float]


def _top_candidates(dist: Distribution, vocabulary, n: int) -> tuple[tuple[Token, float], ...]:
    return tuple(
        (vocabulary.token_of_id(idx), prob) for idx, prob in dist.top(n)
    )


class Session:
    """Serially-consistent state machine owning one pair of datastores."""

    def __init__(
        self,
        model: BaseModel,
        config: SessionConfig | None = None,
        mode: PolicyMode | None = None,
    ):
        self.model = model
        self.config = config or SessionConfig()
        self.mode = mode or PolicyMode.adaptive()
        self.token_store = TokenDatastore(
            model.dimension, k=self.config.k, temperature=self.config.temperature
        )
        self.policy_store = PolicyDatastore(
            self.config.k,
            temperature=self.config.policy_temperature,
            fallback_lambda=self.config.fallback_lambda,
        )
        self.adaptation_log: list[AdaptLogEntry] = []
        self.adapted_sentences = 0

    # -- read path ---------------------------------------------------------

    def _step_lambda(self, neighbors: TokenNeighborSet) -> float:
        if self.mode.kind == "constant":
            return self.mode.lam
        if self.mode.kind == "base_only":
            return 0.0
        features = build_features(neighbors, self.config.k)
        return self.policy_store.predict_lambda(features)

    def decode_trace(self, x: Sentence) -> list[DecodeStep]:
        """Greedy decode, returning every step with full distributions.

        The last step is the one that stopped decoding (end-of-sentence or
        the length cap). Read-only: no datastore is modified.
        """
        require_sentence(x, "source")
        vocabulary = self.model.vocabulary
        max_len = self.config.max_decode_length(len(x))
        retrieval_on = self.mode.kind != "base_only"
        steps: list[DecodeStep] = []
        prefix: list[Token] = []
        while True:
            out: ModelOutput = self.model.forward(x, prefix)
            p_nmt = out.dist
            neighbors = None
            p_knn = None
            lam = 0.0
            if retrieval_on and self.token_store.count > 0:
                neighbors = self.token_store.retrieve(out.hidden, self.config.k)
                p_knn = knn_distribution(neighbors, self.config.temperature, len(vocabulary))
                lam = self._step_lambda(neighbors)
            p_final = interpolate(p_knn, p_nmt, lam) if p_knn is not None else p_nmt
            token = argmax_token(p_final, vocabulary)
            steps.append(
                DecodeStep(
                    token=token,
                    lam=lam,
                    p_nmt=p_nmt,
                    p_knn=p_knn,
                    p_final=p_final,
                    neighbors=neighbors,
                )
            )
            if token.id == EOS_ID or len(prefix) + 1 >= max_len:
                return steps
            prefix.append(token)

    def translate(self, x: Sentence) -> TranslationResult:
        """Greedy hypothesis plus per-token diagnostics; state is not modified."""
        steps = self.decode_trace(x)
        vocabulary = self.model.vocabulary
        tokens: list[Token] = []
        diags: list[TokenDiagnostics] = []
        top_n = min(TOP_CANDIDATES, self.config.k)
        for step in steps:
            if step.token.id == EOS_ID:
                break
            tokens.append(step.token)
            diags.append(
                TokenDiagnostics(
                    token=step.token,
                    lam=step.lam,
                    p_nmt_top=_top_candidates(step.p_nmt, vocabulary, top_n),
                    p_knn_top=(
                        _top_candidates(step.p_knn, vocabulary, top_n)
                        if step.p_knn is not None
                        else ()
                    ),
                    neighbor_distances=(
                        tuple(step.neighbors.distances()) if step.neighbors else ()
                    ),
                )
            )
        return TranslationResult(Sentence(tuple(tokens)), tuple(diags))

    # -- write path ----------------------------------------------------------

    def adapt(self, x: Sentence, y_corrected: Sentence) -> AdaptReport:
        """Fold one corrected sentence into the datastores.

        In adaptive mode every reference position (including the final
        end-of-sentence one) is retrieved against the pre-adaptation token
        datastore to induce a policy label; constant and base modes only
        grow the token datastore.
        """
        require_sentence(x, "source")
        require_sentence(y_corrected, "correction")
        states = self.model.teacher_forced_states(x, y_corrected)
        vocabulary = self.model.vocabulary
        target_ids = [t.id for t in y_corrected.tokens] + [EOS_ID]

        staged = []
        if self.mode.kind == "adaptive":
            for state, target_id in zip(states, target_ids):
                p_nmt_ref = state.dist.prob(target_id)
                if self.token_store.count == 0:
                    self.adaptation_log.append(
                        AdaptLogEntry(target_id, p_nmt_ref, None, None, None)
                    )
                    continue
                neighbors = self.token_store.retrieve(state.hidden, self.config.k)
                p_knn = knn_distribution(neighbors, self.config.temperature, len(vocabulary))
                p_knn_ref = p_knn.prob(target_id)
                features = build_features(neighbors, self.config.k)
                value = induce_value(p_knn_ref, p_nmt_ref)
                predicted = self.policy_store.predict_lambda(features)
                staged.append((features, value))
                self.adaptation_log.append(
                    AdaptLogEntry(target_id, p_nmt_ref, p_knn_ref, value, predicted)
                )

        for features, value in staged:
            self.policy_store.add_entry(features, value)
        added = self.token_store.add_sentence(x, y_corrected, states)
        self.adapted_sentences += 1
        return AdaptReport(token_entries_added=added, policy_entries_added=len(staged))

    def clear_datastores(self) -> None:
        """Empty both datastores; the adaptation log is retained."""
        self.token_store.clear()
        self.policy_store.clear()

    # -- document protocol -----------------------------------------------------

    def run_document(
        self,
        doc: Sequence[tuple[Sentence, Sentence]] | Iterable[tuple[Sentence, Sentence]],
        mode: PolicyMode | None = None,
    ) -> DocumentResult:
        """Translate each sentence with the state adapted on all previous ones.

        The reference plays the human correction. Latency is measured
        around translation only. In base mode no adaptation happens at
        all, so the datastores stay empty.
        """
        pairs = list(doc)
        if not pairs:
            raise InputError("document must contain at least one sentence pair")
        if mode is not None:
            self.mode = mode
        result = DocumentResult([], [], [])
        for position, (x, y_ref) in enumerate(pairs):
            try:
                start = time.perf_counter()
                translated = self.translate(x)
                elapsed_ms = (time.perf_counter() - start) * 1e3
                if self.mode.kind != "base_only":
                    self.adapt(x, y_ref)
            except EngineError as exc:
                raise type(exc)(f"document position {position}: {exc}") from exc
            result.hypotheses.append(translated.hypothesis)
            result.diagnostics.append(translated.diagnostics)
            result.latencies_ms.append(elapsed_ms)
        return result

    # -- introspection -----------------------------------------------------------

    def stats(self) -> dict:
        supported = [e for e in self.adaptation_log if e.p_knn_ref is not None]
        return {
            "token_entries": self.token_store.count,
            "policy_entries": self.policy_store.count,
            "adapted_sentences": self.adapted_sentences,
            "logged_positions": len(self.adaptation_log),
            "logged_with_support": len(supported),
        }
