"""배치 실행용 명령행 인터페이스.

사용법:
    python -m app.cli forward   --config exp.yaml [--seed N] [--out DIR] [--workers N]
    python -m app.cli image     --config exp.yaml --data DIR/data.bsid [--method spectral|correlation]
    python -m app.cli sweep     --config sweep.yaml [--table]
    python -m app.cli stability --config exp.yaml
    python -m app.cli verify    --artifact DIR [--config exp.yaml]

종료 코드: 0 성공, 1 검증 오류, 2 실행 오류, 3 재현성 검증 실패
"""

import argparse
import json
import sys
import traceback
from typing import List, Optional

from app.core.constants.imaging import ImagingMethod
from app.core.exceptions import BaseAppException, ExitCode
from app.core.logger import get_logger, setup_logger
from app.schemas.config_schemas import ExperimentConfig, SweepConfig
from app.services.experiment_service import (
    cmd_forward,
    cmd_image,
    cmd_stability,
    cmd_sweep,
    cmd_verify,
)
from app.utils.config_utils import load_yaml_config


logger = get_logger()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="app.cli", description="노이즈 블렌딩 센서 어레이 이미징 실험")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, config_required: bool = True) -> None:
        p.add_argument("--config", required=config_required, help="YAML 설정 파일")
        p.add_argument("--seed", type=int, default=None, help="루트 seed (설정값 대체)")
        p.add_argument("--out", default=None, help="출력 디렉토리")
        p.add_argument("--workers", type=int, default=None, help="작업자 수 (0 이면 CPU 개수)")

    common(sub.add_parser("forward", help="Born 데이터 행렬 생성"))

    image = sub.add_parser("image", help="데이터 파일 역전파 이미징")
    common(image)
    image.add_argument("--data", required=True, help="forward 가 만든 data.bsid")
    image.add_argument(
        "--method", choices=[m.value for m in ImagingMethod], default=ImagingMethod.SPECTRAL.value,
        help="spectral (주파수 합) 또는 correlation (시간 영역 상관)",
    )

    sweep = sub.add_parser("sweep", help="파라미터 격자 스윕")
    common(sweep)
    sweep.add_argument("--table", action="store_true", help="차수 표 재현 모드")

    common(sub.add_parser("stability", help="앙상블 안정성 리포트"))

    verify = sub.add_parser("verify", help="결과 재현성 검증")
    common(verify, config_required=False)
    verify.add_argument("--artifact", required=True, help="결과 디렉토리 또는 provenance.json")
    return parser


def run(args: argparse.Namespace) -> dict:
    if args.command == "forward":
        config = load_yaml_config(args.config, ExperimentConfig)
        return cmd_forward(config, args.out, args.seed, args.workers)
    if args.command == "image":
        config = load_yaml_config(args.config, ExperimentConfig)
        return cmd_image(config, args.data, args.method, args.out, args.seed, args.workers)
    if args.command == "sweep":
        config = load_yaml_config(args.config, SweepConfig)
        return cmd_sweep(config, args.out, args.seed, args.workers, table=args.table)
    if args.command == "stability":
        config = load_yaml_config(args.config, ExperimentConfig)
        return cmd_stability(config, args.out, args.seed, args.workers)

    config = None
    if args.config:
        try:
            config = load_yaml_config(args.config, ExperimentConfig)
        except BaseAppException:
            config = load_yaml_config(args.config, SweepConfig)
    return cmd_verify(args.artifact, config, args.seed, args.workers)


def main(argv: Optional[List[str]] = None) -> int:
    """CLI 진입점, 예외를 종료 코드로 변환"""
    args = build_parser().parse_args(argv)
    setup_logger(console=True)
    try:
        result = run(args)
    except BaseAppException as e:
        logger.error(f"[{e.error_code.value}] {e.message}")
        print(json.dumps(e.to_dict(), ensure_ascii=False, default=str), file=sys.stderr)
        return e.exit_code
    except Exception:
        logger.error(f"예상치 못한 오류: \n{traceback.format_exc()}")
        return ExitCode.RUNTIME
    print(json.dumps(result, ensure_ascii=False, sort_keys=True, default=str))
    return ExitCode.OK


if __name__ == "__main__":
    sys.exit(main())
