"""
性质套件命令
"""

import logging

from .base_command import BaseCommand
from ..core.suite import PropertySuite

logger = logging.getLogger(__name__)


class SuiteCommand(BaseCommand):
    name = "suite"
    help = "运行全部性质检查，任一失败时退出码为 1"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--only", nargs="+", help="只运行这些检查")
        parser.add_argument("--cases", type=int, default=20, help="随机用例数量")

    def execute(self, args):
        results = PropertySuite(self.config, args.cases).run(args.only)
        self.emit_lines(r.to_dict() for r in results)
        failed = [r.name for r in results if not r.passed]
        if failed:
            logger.error("未通过的检查: %s", ", ".join(failed))
            return 1
        return 0
