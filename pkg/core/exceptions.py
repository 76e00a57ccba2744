"""Hierarquia de erros do verstore."""


class VerstoreError(Exception):
    """Erro base da aplicação."""

    exit_code = 1


class InputError(VerstoreError):
    """Entrada inválida: grafo, solução, arquivo ou parâmetro."""


class InvalidGraph(InputError):
    pass


class InvalidSolution(InputError):
    pass


class UnreachableNode(InputError):
    def __init__(self, node: int, root: int):
        super().__init__(f"nó {node} não é alcançável a partir da raiz {root}")
        self.node = node
        self.root = root


class NotATree(InputError):
    pass


class ParseError(InputError):
    def __init__(self, line: int, message: str):
        super().__init__(f"linha {line}: {message}")
        self.line = line


class DuplicateEdge(InputError):
    def __init__(self, src: int, dst: int, line: int | None = None):
        where = f" (linha {line})" if line is not None else ""
        super().__init__(f"aresta duplicada ({src}, {dst}){where}")
        self.edge = (src, dst)
        self.line = line


class UnknownNode(InputError):
    def __init__(self, node, line: int | None = None):
        where = f" (linha {line})" if line is not None else ""
        super().__init__(f"nó desconhecido {node}{where}")
        self.node = node
        self.line = line


class CyclicHistory(InputError):
    pass


class MissingDelta(InputError):
    pass


class InvalidDecomposition(InputError):
    def __init__(self, condition: str, detail: str = ""):
        msg = f"decomposição inválida ({condition})"
        super().__init__(f"{msg}: {detail}" if detail else msg)
        self.condition = condition


class WidthExceeded(InputError):
    def __init__(self, width: int, k_max: int):
        super().__init__(f"largura {width} excede o limite k_max={k_max}")
        self.width = width
        self.k_max = k_max


class CyclicAnc(InputError):
    pass


class TooLarge(InputError):
    pass


class CostOverflow(InputError):
    pass


class Infeasible(VerstoreError):
    """Nenhuma configuração satisfaz a restrição pedida."""

    exit_code = 2


class DegenerateInputWarning(UserWarning):
    """Entrada degenerada tratada com comportamento padrão (ex.: r_max = 0)."""
