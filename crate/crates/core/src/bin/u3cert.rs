fn main() {
    std::process::exit(u3cert::cli::dispatch(std::env::args_os()));
}
