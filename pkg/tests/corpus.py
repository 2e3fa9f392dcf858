"""Graphs shared by the classifier and search comparisons."""

CORPUS = {
    "C4": "C(4)",
    "C6": "C(6)",
    "C8": "C(8)",
    "C5": "C(5)",
    "path5": "path(5)",
    "lollipop(4,1)": "lollipop(4,1)",
    "lollipop(4,2)": "lollipop(4,2)",
    "lollipop(3,1)": "lollipop(3,1)",
    "K(2,3)": "K(2,3)",
    "K(2,4)": "K(2,4)",
    "K(2,5)": "K(2,5)",
    "K(3,3)": "K(3,3)",
    "Q3-v": "q3_v",
    "K33-e": "k33_e",
    "theta(2,2,4)": "theta(2,2,4)",
    "theta(2,4,4)": "theta(2,4,4)",
    "theta(1,3,3)": "theta(1,3,3)",
    "theta(1,3,5)": "theta(1,3,5)",
    "theta(3,3,3)": "theta(3,3,3)",
    "theta(2,2,2,4)": "theta(2,2,2,4)",
    "theta(1,3,3,3)": "theta(1,3,3,3)",
    "theta(2,2,3)": "theta(2,2,3)",
    "irreducible(1)": "irreducible(1)",
    "irreducible(2)": "irreducible(2)",
    "irreducible(3)": "irreducible(3)",
    "irreducible(4)": "irreducible(4)",
    "C4.C4": "glued(C(4),C(4))",
    "C4-C4 bridge": "glued(C(4),C(4),1)",
    "C4.C6": "glued(C(4),C(6))",
    "C4.theta222": "glued(C(4),theta(2,2,2))",
    "theta222.theta222": "glued(theta(2,2,2),theta(2,2,2))",
    "K24.C4": "glued(K(2,4),C(4))",
    "theta224.C4": "glued(theta(2,2,4),C(4),0,2,0)",
    "C4 chain opposite": "glued(glued(C(4),C(4),0,2,0),C(4),0,5,0)",
    "C4 chain adjacent": "glued(glued(C(4),C(4),0,1,0),C(4),0,4,0)",
    "C4 star": "glued(glued(C(4),C(4)),C(4))",
    "C4 chain of four": "glued(glued(glued(C(4),C(4),0,2,0),C(4),0,4,0),C(4),0,6,0)",
    "C6-C6-C4": "glued(glued(C(6),C(6),0,3,0),C(4),0,8,0)",
    "C4 K2 C4": "glued(C(4),C(4),2)",
    "figS": "figure(figS)",
    "figP": "figure(figP)",
}
