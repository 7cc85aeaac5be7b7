"""Regenerate ``src/foonplan/data/vectors.txt``.

The bundled vectors are small, hand-designed embeddings: every token is a
weighted sum of semantic feature directions (an orthonormal random basis)
plus a little private noise, so similar foods land close together without
shipping a multi-gigabyte pretrained model. Any whitespace word2vec text
file with the same header format can replace them via ``--vectors``.

    python3 scripts/make_vectors.py [--out PATH] [--seed N]
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

DIMS = 128
NOISE = 0.3

F = dict  # token -> {feature: weight}

TOKENS: dict[str, dict[str, float]] = {
    # gourds, peppers, alliums
    "cucumber": F(food=1, vegetable=1, gourd=2),
    "zucchini": F(food=1, vegetable=1, gourd=2),
    "pumpkin": F(food=1, vegetable=.8, gourd=1.2, sweet=.6, starchy=.6),
    "chili": F(hotpepper=2, nightshade=.8, vegetable=.6, food=.6, seasoning=.4),
    "jalapeño": F(hotpepper=2, nightshade=.9, vegetable=.7, food=.7, seasoning=.2),
    "jalapeno": F(hotpepper=2, nightshade=.9, vegetable=.7, food=.7, seasoning=.2),
    "pepper": F(seasoning=.8, hotpepper=1, nightshade=.8, vegetable=.5, food=.5),
    "bell": F(nightshade=1, vegetable=1, food=.8, sweet=.4, shape=1.2),
    "paprika": F(seasoning=1.4, hotpepper=.6, nightshade=.4, powder=.8),
    "tomato": F(nightshade=1.3, vegetable=1, food=1, fruit=.4, sour=.3),
    "potato": F(nightshade=.6, vegetable=1, food=1, starchy=1.6, root=.8),
    "eggplant": F(nightshade=1.2, vegetable=1.1, food=1, gourd=.3),
    "onion": F(food=1, vegetable=1, allium=2),
    "shallot": F(allium=2, vegetable=.9, food=1),
    "leek": F(allium=1.6, vegetable=1.1, food=1, leafy=.5),
    "garlic": F(allium=1.5, seasoning=1.0, vegetable=.6, food=1),
    "scallion": F(allium=1.5, vegetable=1, food=1, leafy=.6, green=.3),
    # roots, leaves, stalks
    "carrot": F(root=2, vegetable=1, food=1, sweet=.3),
    "parsnip": F(root=2, vegetable=1, food=1, starchy=.4),
    "beet": F(root=1.8, vegetable=1, food=1, sweet=.5),
    "radish": F(root=1.8, vegetable=1, food=1, hot=.4),
    "celery": F(stalk=2, vegetable=1, food=1, leafy=.4),
    "asparagus": F(stalk=1.8, vegetable=1, food=1, green=.5),
    "lettuce": F(leafy=2, vegetable=1, food=1, green=.4),
    "spinach": F(leafy=2, vegetable=1, food=1, green=.8),
    "kale": F(leafy=1.8, cabbage=.8, vegetable=1, food=1, green=.6),
    "cabbage": F(cabbage=2, leafy=.8, vegetable=1, food=1),
    "broccoli": F(cabbage=1.6, vegetable=1, food=1, green=.8),
    "cauliflower": F(cabbage=1.6, vegetable=1, food=1, white=.6),
    "corn": F(grain=1.2, vegetable=.8, food=1, sweet=.5, starchy=.8),
    "peas": F(legume=1.6, vegetable=.8, food=1, green=.6),
    "bean": F(legume=2, vegetable=.6, food=1, protein=.5),
    "beans": F(legume=2, vegetable=.6, food=1, protein=.5),
    "lentil": F(legume=2, food=1, protein=.6, grain=.3),
    "mushroom": F(fungus=2, vegetable=.7, food=1),
    "avocado": F(fruit=.8, fat=1, vegetable=.6, food=1, green=.6, creamy=.6),
    "olive": F(fruit=.7, fat=.6, food=1, salty=.8, olivef=1.5),
    # fruit
    "mango": F(tropical=2, fruit=1, food=1, sweet=.3),
    "pineapple": F(tropical=2, fruit=1, food=1, sweet=.3, citrus=.3),
    "papaya": F(tropical=1.9, fruit=1, food=1, sweet=.4),
    "banana": F(fruit=1, food=1, tropical=.8, sweet=.6, starchy=.8),
    "coconut": F(tropical=1.4, nut=.6, fruit=.6, food=1, fat=.5),
    "lemon": F(citrus=2, fruit=1, food=1, sour=1),
    "lime": F(citrus=2, fruit=1, food=1, sour=1, green=.3),
    "orange": F(citrus=1.4, fruit=1, food=1, sweet=.8),
    "grapefruit": F(citrus=1.8, fruit=1, food=1, sour=.6, sweet=.2),
    "apple": F(pome=2, fruit=1, food=1, sweet=.5),
    "pear": F(pome=2, fruit=1, food=1, sweet=.6),
    "peach": F(stone=2, fruit=1, food=1, sweet=.7),
    "apricot": F(stone=1.9, fruit=1, food=1, sweet=.5, dried=.3),
    "plum": F(stone=2, fruit=1, food=1, sweet=.5, sour=.2),
    "cherry": F(stone=1.6, berry=.6, fruit=1, food=1, sweet=.6),
    "strawberry": F(berry=2, fruit=1, food=1, sweet=.6),
    "raspberry": F(berry=2, fruit=1, food=1, sweet=.4, sour=.3),
    "blueberry": F(berry=2, fruit=1, food=1, sweet=.5),
    "grape": F(berry=1.4, fruit=1, food=1, sweet=.7),
    "watermelon": F(melon=2, fruit=1, food=1, sweet=.6),
    "melon": F(melon=2, fruit=1, food=1, sweet=.5),
    "raisin": F(berry=.8, fruit=.8, dried=1.5, sweet=.8, food=1),
    # nuts and seeds
    "walnut": F(nut=2, food=.5, tree=.4),
    "almond": F(nut=2, food=.5, tree=.4, sweet=.1),
    "cashew": F(nut=2, food=.5, tree=.2),
    "pistachio": F(nut=2, food=.5, tree=.3, green=.3),
    "peanut": F(nut=1.6, legume=.9, food=.5),
    "hazelnut": F(nut=1.9, food=.5, tree=.5, sweet=.2),
    "pecan": F(nut=1.9, food=.5, tree=.5, sweet=.3),
    "sesame": F(seed=2, food=.6, fat=.4),
    # meat, fish, eggs
    "chicken": F(poultry=2, meat=1.2, food=1, protein=.6),
    "turkey": F(poultry=2, meat=1.2, food=1, protein=.6),
    "duck": F(poultry=1.8, meat=1.2, food=1, fat=.4),
    "beef": F(redmeat=2, meat=1.4, food=1, protein=.6),
    "pork": F(pork=2, meat=1.3, food=1, protein=.5),
    "ham": F(pork=1.8, meat=1.2, food=1, salty=.6, cured=.8),
    "bacon": F(pork=1.8, meat=1.1, food=1, salty=.6, fat=.6, cured=.8),
    "sausage": F(pork=1.2, meat=1.3, food=1, cured=.8, redmeat=.4),
    "salmon": F(fish=2, food=1, protein=.6, fat=.4),
    "tuna": F(fish=2, food=1, protein=.7),
    "shrimp": F(shellfish=2, fish=.6, food=1, protein=.6),
    "fish": F(fish=2, food=1, protein=.5),
    "egg": F(eggf=2, food=1, protein=.8),
    "eggs": F(eggf=2, food=1, protein=.8),
    "tofu": F(legume=1, protein=1, food=1, white=.5, soft=.8),
    # dairy
    "milk": F(dairy=2, liquid=1, food=.6, white=.5),
    "cream": F(dairy=2, liquid=.6, fat=.8, food=.6, creamy=.8),
    "butter": F(dairy=1.4, fat=1.6, food=.6),
    "yogurt": F(dairy=2, creamy=1, sour=.5, food=.6),
    "cheese": F(cheesef=2, dairy=1, food=.8, salty=.4),
    "feta": F(cheesef=2, dairy=.9, food=.8, salty=.8, crumbly=.6),
    "parmesan": F(cheesef=2, dairy=.9, food=.8, salty=.7, hard=.8),
    "mozzarella": F(cheesef=2, dairy=1.1, food=.8, soft=.8),
    "cheddar": F(cheesef=2, dairy=1, food=.8, hard=.5),
    "ice": F(cold=2, liquid=.5, water=1),
    # grains, baking
    "flour": F(grain=1.5, powder=1.4, baking=1.2, food=.6),
    "sugar": F(sweet=2, powder=.8, baking=1, seasoning=.4),
    "honey": F(sweet=2, liquid=.6, syrup=1.2, food=.6),
    "syrup": F(sweet=1.8, liquid=.8, syrup=1.6),
    "chocolate": F(sweet=1.4, cocoaf=2, food=.6, fat=.4),
    "cocoa": F(cocoaf=2, powder=1, baking=.6, sweet=.4),
    "vanilla": F(flavoring=2, sweet=.8, baking=.6),
    "cinnamon": F(spice=2, sweet=.4, baking=.6, seasoning=.6),
    "yeast": F(baking=1.6, leaven=2, food=.3),
    "baking": F(baking=2, powder=.4),
    "soda": F(leaven=1.2, baking=1, drinkf=.8, powder=.4),
    "bread": F(grain=1.4, baking=1, food=1, breadf=2),
    "rice": F(grain=2, starchy=1, food=1, white=.4),
    "pasta": F(grain=1.6, starchy=1, food=1, noodle=1.6),
    "noodle": F(grain=1.4, starchy=.8, food=1, noodle=2),
    "oats": F(grain=2, food=1, breakfast=.8),
    "crouton": F(breadf=1.8, grain=1, food=.8, crunchy=.8),
    "batter": F(baking=1.6, mixture=1.6, food=.6),
    "dough": F(baking=1.6, mixture=1.4, grain=.6, food=.6),
    # liquids, seasonings, sauces
    "water": F(water=2, liquid=1.2),
    "oil": F(fat=1.8, liquid=1, cooking=.8),
    "vinegar": F(sour=1.6, liquid=1, condiment=1),
    "salt": F(seasoning=2, salty=1.2, mineral=1),
    "sauce": F(condiment=1.6, liquid=.8, food=.6, sauce=1.6),
    "mayonnaise": F(condiment=1.6, creamy=1, fat=.8, eggf=.4),
    "mustard": F(condiment=1.8, seasoning=.6, hot=.5),
    "ketchup": F(condiment=1.8, sweet=.4, nightshade=.5, sauce=.6),
    "basil": F(herb=2, leafy=.6, green=.6, seasoning=.6),
    "parsley": F(herb=2, leafy=.7, green=.7, seasoning=.5),
    "cilantro": F(herb=2, leafy=.6, green=.7, seasoning=.6),
    "mint": F(herb=1.8, leafy=.5, green=.5, cold=.3),
    "oregano": F(herb=1.8, seasoning=.9, dried=.5),
    "ginger": F(spice=1.6, root=.8, hot=.6, seasoning=.6),
    "tea": F(tea=2, drinkf=1, leafy=.4, dried=.6),
    "coffee": F(coffeef=2, drinkf=1, bitter=.8),
    "juice": F(drinkf=1.5, liquid=1, fruit=.6, sweet=.3),
    "wine": F(drinkf=1.4, liquid=.8, alcohol=2),
    "beer": F(drinkf=1.4, liquid=.8, alcohol=1.8, grain=.4),
    "lemonade": F(drinkf=1.6, citrus=1, sweet=.8, liquid=.6),
    "smoothie": F(drinkf=1.6, blendedf=1.4, fruit=.6),
    "milkshake": F(drinkf=1.6, blendedf=1.2, dairy=.8, sweet=.6),
    "soup": F(dish=1.6, liquid=.8, soupf=2),
    "stew": F(dish=1.6, liquid=.6, soupf=1.6, meat=.4),
    "salad": F(dish=1.6, leafy=.6, saladf=2),
    "cake": F(dish=1.2, baking=1.2, sweet=.8, cakef=2),
    "omelette": F(dish=1.4, eggf=1.4, omelettef=2),
    "pizza": F(dish=1.6, breadf=.8, cheesef=.5, pizzaf=2),
    "sandwich": F(dish=1.6, breadf=1.2, sandwichf=2),
    "tart": F(dish=1.2, baking=1.2, sweet=.6, cakef=1),
    "pie": F(dish=1.2, baking=1.2, sweet=.5, cakef=1),
    # dish-name words
    "greek": F(cuisine=2, mediterranean=1.5),
    "italian": F(cuisine=2, mediterranean=1.2),
    "mexican": F(cuisine=2, latin=1.5),
    "thai": F(cuisine=2, asian=1.5),
    "caesar": F(cuisine=1.2, saladf=.6, namef=1.5),
    "cobb": F(cuisine=1, saladf=.6, namef=1.5),
    "fruit": F(fruit=2, food=1, sweet=.4),
    "vegetable": F(vegetable=2, food=1),
    "sponge": F(cakef=.6, soft=1.2, texture=1.5),
    "pound": F(cakef=.6, dense=1.2, texture=1.5),
    "plain": F(simple=2),
    "iced": F(cold=1.6, simple=.4),
    "fried": F(cooking=1.6, fat=.6),
    "roast": F(cooking=1.6, baked=.8),
    "whole": F(simple=1, raw=1),
    "fresh": F(simple=.8, raw=1.2),
    "green": F(green=2),
    "red": F(redc=2),
    "black": F(blackc=2),
    "sweet": F(sweet=2),
    "hot": F(hot=2),
    "dried": F(dried=2),
    # utensils
    "bowl": F(container=2, kitchenware=1),
    "pan": F(container=1.4, cookware=1.6, kitchenware=1),
    "pot": F(container=1.4, cookware=1.6, kitchenware=1, liquid=.2),
    "cup": F(container=1.8, drinkware=1.2, kitchenware=.8),
    "glass": F(container=1.6, drinkware=1.6, kitchenware=.8),
    "plate": F(container=1.4, tableware=1.6, kitchenware=.8),
    "blender": F(appliance=2, container=.8, kitchenware=.8),
    "mixer": F(appliance=2, kitchenware=.8, baking=.3),
    "oven": F(appliance=2, cookware=.6, baking=.6),
    "stove": F(appliance=2, cookware=.8),
    "knife": F(tool=2, blade=1.6, kitchenware=.8),
    "peeler": F(tool=2, blade=1, kitchenware=.8),
    "grater": F(tool=2, blade=.8, kitchenware=.8),
    "whisk": F(tool=2, stirring=1.2, kitchenware=.8),
    "spoon": F(tool=1.6, stirring=1, tableware=.8, kitchenware=.8),
    "fork": F(tool=1.6, tableware=1.2, kitchenware=.8),
    "spatula": F(tool=2, stirring=.8, cookware=.4, kitchenware=.8),
    "ladle": F(tool=1.8, stirring=.6, liquid=.3, kitchenware=.8),
    "juicer": F(tool=1.4, appliance=.8, citrus=.3, kitchenware=.8),
    "mortar": F(tool=1.6, stone=.2, kitchenware=.8, crushing=1.2),
    "cutting": F(blade=.6, kitchenware=1.2, board=1),
    "board": F(board=2, kitchenware=.8),
    "shaker": F(tool=1, container=.6, drinkware=.6, kitchenware=.8),
}


def build(seed: int = 7) -> dict[str, np.ndarray]:
    rng = np.random.default_rng(seed)
    features = sorted({f for w in TOKENS.values() for f in w})
    if len(features) > DIMS:
        raise SystemExit(f"{len(features)} features do not fit in {DIMS} dimensions")
    basis, _ = np.linalg.qr(rng.standard_normal((DIMS, DIMS)))
    direction = {f: basis[:, i] for i, f in enumerate(features)}
    out = {}
    for token in sorted(TOKENS):
        vec = sum((w * direction[f] for f, w in TOKENS[token].items()), np.zeros(DIMS))
        noise = rng.standard_normal(DIMS)
        out[token] = vec + NOISE * noise / np.linalg.norm(noise)
    return out


def write(vectors: dict[str, np.ndarray], path: Path) -> None:
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"{len(vectors)} {DIMS}\n")
        for token, vec in vectors.items():
            fh.write(token + " " + " ".join(f"{v:.5f}" for v in vec) + "\n")


def main() -> None:
    here = Path(__file__).resolve().parent.parent
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=here / "src" / "foonplan" / "data" / "vectors.txt")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    write(build(args.seed), args.out)
    print(f"wrote {len(TOKENS)} vectors to {args.out}")


if __name__ == "__main__":
    main()
