"""
실행 매니페스트 (설정 사본, 입력 해시, 단계별 소요 시간, 출력 경로)
명령이 끝날 때 JSON 으로 원자적으로 기록됩니다.
"""
from __future__ import annotations

import logging
import time
from collections.abc import Iterator
from contextlib import contextmanager

from src.shared.config import config_echo
from src.shared.io import hash_inputs, write_json_atomic
from src.shared.schemas import RunConfig
from src.shared.types import RunManifest, StageTiming

logger = logging.getLogger(__name__)


class ManifestRecorder:
    def __init__(self, command: str, config: RunConfig):
        self.command = command
        self.config = config
        self.inputs: dict[str, str] = {}
        self.timings: list[StageTiming] = []
        self.outputs: dict[str, str] = {}

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        started = time.perf_counter()
        logger.info(f"▶️ 단계 시작: {name}")
        try:
            yield
        finally:
            elapsed = time.perf_counter() - started
            self.timings.append(StageTiming(stage=name, seconds=round(elapsed, 6)))
            logger.info(f"⏱️ 단계 종료: {name} ({elapsed:.2f}s)")

    def add_inputs(self, *paths: str) -> None:
        self.inputs.update(hash_inputs([p for p in paths if p]))

    def add_output(self, key: str, path: str) -> None:
        self.outputs[key] = path

    def build(self) -> RunManifest:
        return RunManifest(
            command=self.command,
            config=config_echo(self.config),
            inputs=dict(sorted(self.inputs.items())),
            timings=list(self.timings),
            outputs=dict(self.outputs),
        )

    def write(self, path: str) -> RunManifest:
        manifest = self.build()
        write_json_atomic(manifest, path)
        logger.info(f"🧾 매니페스트 저장: {path}")
        return manifest
