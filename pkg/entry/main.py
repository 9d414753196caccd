#!/usr/bin/env python3
"""
Loop TAD Entry Point
`python -m entry.main <command>` 또는 `run_pipeline.py` 로 실행합니다.

명령:
    synth   합성 코퍼스 (그리고 --target 시 대상 학습/테스트 분할) 생성
    train   사전학습 / 미세조정 (--phase, --ablation)
    detect  분해 → 재구성 점수 → POT 임계값 → 라벨 (--labels 시 지표)
    report  탐지 결과 디렉터리에서 SVG + index.html 생성
    ablate  네 가지 ablation 모드를 한 설정으로 실행하고 F1 비교

종료 코드: 0 성공, 1 설정 검증, 2 입출력, 3 수치 오류
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from collections.abc import Sequence

from dotenv import load_dotenv

from src.cli import INLINE_LABELS, cmd_ablate, cmd_detect, cmd_report, cmd_synth, cmd_train
from src.numerics import AutogradError, DimensionError
from src.shared.config import load_run_config
from src.shared.errors import TadError
from src.shared.schemas import ABLATIONS, RunConfig

logger = logging.getLogger("entry.main")

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"
LOG_LEVEL_ENV = "TAD_LOG_LEVEL"


def _configure_logging(level: str | None) -> None:
    name = (level or os.getenv(LOG_LEVEL_ENV, "INFO")).upper()
    resolved = getattr(logging, name, logging.INFO)
    logging.basicConfig(level=resolved, format=LOG_FORMAT)
    logging.getLogger().setLevel(resolved)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="YAML 설정 파일 (기본: 번들 desk-scale 설정)")
    common.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="설정 덮어쓰기 (예: --set train.pretrain_epochs=5), 반복 가능",
    )
    common.add_argument("--log-level", default=None, help=f"로그 레벨 (기본: ${LOG_LEVEL_ENV} 또는 INFO)")

    parser = argparse.ArgumentParser(prog="loop-tad", description="분해 기반 시계열 이상 탐지 파이프라인")
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", parents=[common], help="합성 데이터 생성")
    synth.add_argument("--target", action="store_true", help="대상 학습/테스트 분할도 생성")
    synth.add_argument("--no-corpus", action="store_true", help="코퍼스 생성 생략 (--target 과 함께 사용)")

    train = sub.add_parser("train", parents=[common], help="모델 학습")
    train.add_argument("--phase", choices=("pretrain", "finetune", "both"), default=None)
    train.add_argument("--ablation", choices=ABLATIONS, default=None)

    detect = sub.add_parser("detect", parents=[common], help="이상 탐지")
    detect.add_argument("--checkpoint", default=None)
    detect.add_argument("--data", default=None, help="대상 CSV 파일 또는 엔티티 CSV 디렉터리")
    detect.add_argument(
        "--labels", nargs="?", const=INLINE_LABELS, default=None,
        help="정답 라벨: 값 없이 주면 데이터의 label 컬럼, 경로를 주면 해당 CSV",
    )
    detect.add_argument("--calibration-data", default=None, help="POT 보정용 학습 분할 (기본: paths.train_data)")
    detect.add_argument("--run-dir", default=None)

    report = sub.add_parser("report", parents=[common], help="보고서 생성")
    report.add_argument("--run-dir", default=None)

    ablate = sub.add_parser("ablate", parents=[common], help="ablation 실행")
    ablate.add_argument("--modes", nargs="+", choices=ABLATIONS, default=list(ABLATIONS))
    ablate.add_argument("--out", default=None, help="ablation 출력 루트")
    return parser


def _overrides(args: argparse.Namespace) -> list[str]:
    extra: list[str] = []
    if args.command == "train":
        if args.phase:
            extra.append(f"train.phase={args.phase}")
        if args.ablation:
            extra.append(f"train.ablation={args.ablation}")
    if args.command == "detect" and args.run_dir:
        extra.append(f"paths.run_dir={args.run_dir}")
    return [*args.overrides, *extra]


def _dispatch(args: argparse.Namespace, run: RunConfig) -> None:
    match args.command:
        case "synth":
            if args.no_corpus and not args.target:
                logger.warning("⚠️ --no-corpus 만 지정되어 생성할 것이 없습니다")
            cmd_synth(run, corpus=not args.no_corpus, target=args.target)
        case "train":
            cmd_train(run)
        case "detect":
            cmd_detect(run, args.checkpoint, args.data, args.labels, args.calibration_data)
        case "report":
            cmd_report(run, args.run_dir)
        case "ablate":
            cmd_ablate(run, tuple(args.modes), args.out)


def main(argv: Sequence[str] | None = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    _configure_logging(args.log_level)

    try:
        run = load_run_config(args.config, _overrides(args))
        logger.info(f"🚀 {args.command} 시작 (seed={run.seed})")
        _dispatch(args, run)
    except TadError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return e.exit_code
    except (DimensionError, AutogradError) as e:
        logger.error(f"❌ 수치 연산 오류: {e}")
        return 3
    except OSError as e:
        logger.error(f"❌ 입출력 오류: {e}")
        return 2
    logger.info(f"✅ {args.command} 완료")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
