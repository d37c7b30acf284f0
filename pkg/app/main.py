import os

import uvicorn
from dotenv import load_dotenv
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from app.routers import charsums, curves, fields, periods

load_dotenv()

app = FastAPI(
    title="Generalized Legendre curves API",
    description="Point counts, Gauss and Jacobi sums, Greene hypergeometric functions and periods "
                "for curves y^N = x^i (1-x)^j (1-lambda x)^k.",
    version="0.1.0",
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Routers
app.include_router(fields.router)
app.include_router(charsums.router)
app.include_router(curves.router)
app.include_router(periods.router)

# Base endpoint


@app.get("/")
def read_root():
    return {"message": "Welcome to the Generalized Legendre curves API"}


if __name__ == "__main__":
    uvicorn.run(
        "app.main:app",
        host=os.getenv("HOST", "0.0.0.0"),
        port=int(os.getenv("PORT", "8000")),
        reload=True,
    )
