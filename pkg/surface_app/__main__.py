from surface_app import config
import uvicorn


def main():
    print(f"Starting {config.get('API_TITLE')} version {config.get('VERSION')}")
    print(f"Description: {config.get('API_DESCRIPTION')}")
    print(f"Last update: {config.get('LAST_UPDATE')}")

    uvicorn.run(
        app="surface_app:app",
        host=config.get("host", "0.0.0.0"),
        port=config.get_int("port", 8000),
        reload=config.get_bool("debug"),
        log_level=config.get("logger_verbosity", "INFO").lower(),
    )


if __name__ == "__main__":
    main()
