from dataclasses import dataclass
from typing import Dict, List, Optional


@dataclass
class Item:
    sku: str
    quantity: int
    price: float


class Inventory:
    def __init__(self) -> None:
        self.items = {}

    def add(self, item: Item) -> None:
        self.items[item.sku] = item

    def find(self, sku: str) -> Optional[Item]:
        return self.items.get(sku)

    def total_value(self) -> float:
        total: float = 0.0
        for item in self.items.values():
            total += item.price * item.quantity
        return total

    def skus(self) -> List[str]:
        names: List[str] = sorted(self.items)
        return names


def restock(inventory: Inventory, sku: str, amount: int) -> bool:
    item = inventory.find(sku)
    if item is None:
        return False
    item.quantity += amount
    return True


def count_by_prefix(skus: List[str], width: int) -> Dict[str, int]:
    counts: Dict[str, int] = {}
    for sku in skus:
        prefix: str = sku[:width]
        counts[prefix] = counts.get(prefix, 0) + 1
    return counts


LOW_STOCK: int = 5
DEFAULT_ITEM: Item = Item("none", 0, 0.0)
