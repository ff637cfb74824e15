fn main() {
    std::process::exit(homog_cli::dispatch(std::env::args_os()));
}
