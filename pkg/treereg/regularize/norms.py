from ..diffcore import Node, absolute, lift, reduce_sum, square


def l1(theta: Node) -> Node:
    return reduce_sum(absolute(lift(theta)))


def l2(theta: Node) -> Node:
    return reduce_sum(square(lift(theta)))
