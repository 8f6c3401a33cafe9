"""シミュレータ共通の例外定義

CLI (main.py) は exit_code を見て終了コードを決める
"""


class HomSimError(Exception):
    """全例外の基底クラス"""

    exit_code = 1


class UsageError(HomSimError):
    """コマンドライン・設定の使い方の誤り"""

    exit_code = 2


class ConfigParseError(UsageError):
    """設定ファイルの構文エラー（行番号付き）"""

    def __init__(self, message: str, line_number: int = 0):
        self.line_number = line_number
        if line_number:
            message = f"{line_number}行目: {message}"
        super().__init__(message)


class InvalidStateError(HomSimError, ValueError):
    """物理的に無効な状態（ゼロ振幅、重みの和が1でない等）"""

    exit_code = 2


class DimensionError(HomSimError, ValueError):
    """配列長や格子の不一致"""

    exit_code = 3


class TruncationError(HomSimError):
    """格子の台が狭すぎて質量が切り捨てられた"""

    exit_code = 3


class NumericalIntegrityError(HomSimError, ArithmeticError):
    """数値積分の整合性チェック失敗（虚部残差・値域外など）"""

    exit_code = 3


class DataIOError(HomSimError, OSError):
    """ファイル入出力の失敗"""

    exit_code = 4


class InputFileError(DataIOError):
    """入力ファイル（波動関数・設定）を読めない"""


class ExportError(DataIOError):
    """出力ファイルの書き込み・読み込み失敗"""
