from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class AblationFlags:
    no_decompose: bool = False
    no_compress: bool = False
    no_context: bool = False
    no_fix: bool = False

    def any(self) -> bool:
        return any(asdict(self).values())

    def label(self) -> str:
        on = [k.replace("_", "-") for k, v in asdict(self).items() if v]
        return "+".join(on) if on else "full"


FULL = AblationFlags()
