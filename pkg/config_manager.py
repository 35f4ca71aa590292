#!/usr/bin/env python3
"""
配置管理工具
用于生成、验证和管理 Stieltjes 计算工具的配置文件
"""

import argparse
import datetime
import os
import shutil
import sys
from typing import Any, Dict, List

from src.utils.config import AppConfig


def generate_default_config(output_path: str = "config.yaml") -> bool:
    """生成默认配置文件"""
    try:
        AppConfig().to_yaml(output_path)
        print(f"✅ 默认配置文件已生成: {output_path}")
        return True
    except ValueError as e:
        print(f"❌ 生成配置文件失败: {e}")
        return False


def validate_config(config_path: str) -> bool:
    """验证配置文件并显示摘要"""
    try:
        config = AppConfig.from_yaml(config_path)
    except (FileNotFoundError, ValueError) as e:
        print(f"❌ 配置文件验证失败: {e}")
        return False

    problems = []
    if config.grid.grid_size < 2:
        problems.append("grid.grid_size 至少为 2")
    if config.grid.triadic_power < 1:
        problems.append("grid.triadic_power 至少为 1")
    for name, value in vars(config.tolerance).items():
        if value <= 0:
            problems.append(f"tolerance.{name} 必须为正数")
    if config.metric.pair_grid < 2:
        problems.append("metric.pair_grid 至少为 2")
    if config.continuity.offsets < 1:
        problems.append("continuity.offsets 至少为 1")
    if not 0.0 < config.continuity.ratio < 1.0:
        problems.append("continuity.ratio 必须在 (0, 1) 内")
    if config.validation.custom_samples < 2:
        problems.append("validation.custom_samples 至少为 2")
    if config.validation.truncation_depth < 2:
        problems.append("validation.truncation_depth 至少为 2")
    if problems:
        print(f"❌ 配置文件验证失败: {config_path}")
        for item in problems:
            print(f"  • {item}")
        return False

    print(f"✅ 配置文件验证成功: {config_path}")
    print("\n📋 配置摘要:")
    print(f"  网格点数: {config.grid.grid_size}")
    print(f"  三进制网格幂次: {config.grid.triadic_power}")
    print(f"  随机种子: {config.grid.random_seed}")
    print(f"  默认容差: {config.tolerance.tol:g}")
    print(f"  求积容差: {config.tolerance.quad_tol:g}")
    print(f"  Γ 点对网格: {config.metric.pair_grid}")
    print(f"  日志级别: {config.log_level}")
    return True


def _flatten(d: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    out = {}
    for key, value in d.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, f"{name}."))
        else:
            out[name] = value
    return out


def config_diff(config_path: str) -> List[str]:
    """当前配置与默认配置不同的项"""
    current = _flatten(AppConfig.from_yaml(config_path).to_dict())
    default = _flatten(AppConfig().to_dict())
    return [f"{key}: {default[key]} -> {current[key]}" for key in sorted(current) if current[key] != default.get(key)]


def show_config_diff(config_path: str) -> bool:
    """显示当前配置与默认配置的差异"""
    try:
        diff_items = config_diff(config_path)
    except (FileNotFoundError, ValueError) as e:
        print(f"❌ 配置差异分析失败: {e}")
        return False

    print(f"📊 配置文件差异分析: {config_path}")
    print("=" * 50)
    if diff_items:
        print("🔧 已修改的配置项:")
        for item in diff_items:
            print(f"  • {item}")
    else:
        print("📝 所有配置项均为默认值")
    return True


def backup_config(config_path: str, backup_path: str = None) -> bool:
    """备份配置文件"""
    if not os.path.exists(config_path):
        print(f"❌ 配置文件不存在: {config_path}")
        return False

    if backup_path is None:
        timestamp = datetime.datetime.now().strftime("%Y%m%d_%H%M%S")
        backup_path = f"{config_path}.backup_{timestamp}"

    try:
        shutil.copy2(config_path, backup_path)
        print(f"✅ 配置文件已备份: {backup_path}")
        return True
    except OSError as e:
        print(f"❌ 备份配置文件失败: {e}")
        return False


def main():
    """主函数"""
    parser = argparse.ArgumentParser(
        description="Stieltjes 计算工具配置管理",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
使用示例:
  python config_manager.py generate                    # 生成默认配置
  python config_manager.py validate config.yaml        # 验证配置文件
  python config_manager.py diff config.yaml            # 显示配置差异
  python config_manager.py backup config.yaml          # 备份配置文件
        """,
    )
    parser.add_argument("action", choices=["generate", "validate", "diff", "backup"], help="要执行的操作")
    parser.add_argument("config_path", nargs="?", default="config.yaml", help="配置文件路径 (默认: config.yaml)")
    parser.add_argument("--backup-path", help="备份文件路径 (仅用于backup操作)")
    args = parser.parse_args()

    if args.action == "generate":
        success = generate_default_config(args.config_path)
    elif args.action == "validate":
        success = validate_config(args.config_path)
    elif args.action == "diff":
        success = show_config_diff(args.config_path)
    else:
        success = backup_config(args.config_path, args.backup_path)

    sys.exit(0 if success else 1)


if __name__ == "__main__":
    main()
