#!/usr/bin/env python3
"""
Stieltjes 微积分命令行工具
子命令：classify、deriv、integrate、expg、solve、kernel、gamma、metric、mvt、cantor、reproduce、suite
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from src.commands import COMMANDS, UsageError
from src.utils.config import AppConfig
from src.utils.exceptions import StieltjesError
from src.utils.logging_setup import setup_logging

logger = logging.getLogger("stieltjes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="数值 Stieltjes 微积分工具",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
使用示例:
  python stieltjes.py classify --g gderexample --grid 7
  python stieltjes.py expg --beta 0 --at 0.7
  python stieltjes.py reproduce --figure v
  python stieltjes.py kernel --g example1 step --values 0,1,2
  python stieltjes.py gamma --f F1 --h F2 --g cantor
  python stieltjes.py suite
        """,
    )
    parser.add_argument("--config", help="配置文件路径（缺省读取 STIELTJES_CONFIG 或 config.yaml）")
    parser.add_argument("--log-level", help="日志级别，覆盖配置文件")
    parser.add_argument("--format", choices=("csv", "json"), default="csv", help="曲线输出格式")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        sub = subparsers.add_parser(command.name, help=command.help, description=command.help)
        command.add_arguments(sub)
        sub.set_defaults(command_class=command)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """
    解析参数并执行子命令

    Args:
        argv: 参数列表，缺省为 sys.argv[1:]

    Returns:
        退出码：0 成功，1 数值失败（标准输出给出 JSON 诊断），2 用法错误
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2

    try:
        config = AppConfig.load(args.config)
    except (FileNotFoundError, ValueError) as e:
        print(f"配置加载失败: {e}", file=sys.stderr)
        return 2
    if args.log_level:
        config.log_level = args.log_level.upper()
    setup_logging(config.log_level, config.debug_mode)

    command = args.command_class(config)
    try:
        return command.execute(args)
    except UsageError as e:
        print(f"{args.command}: {e}", file=sys.stderr)
        return 2
    except StieltjesError as e:
        logger.error("%s: %s", type(e).__name__, e.message)
        print(json.dumps(e.to_dict(), ensure_ascii=False, default=str))
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
