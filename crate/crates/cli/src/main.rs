fn main() {
    std::process::exit(resolvent_cli::dispatch(std::env::args_os()));
}
